#include <stdio.h>
#include "bsroots.h"
int main(void) {
    printf("version: %s\n", bsr_version());
    BsrReport *r = NULL;
    BsrStatus st = bsr_analyze("x^2*z + y^2*z - z^3", NULL,
                               "[{\"type\": \"A1\", \"count\": 2}]", 0, 0, &r);
    if (st != BSR_STATUS_OK) { fprintf(stderr, "err: %s\n", bsr_last_error_message()); return 1; }
    printf("complete: %d, undetermined: %d\n", bsr_report_complete(r), (int)bsr_report_undetermined_count(r));
    bsr_report_free(r);
    BsrStatus bad = bsr_analyze("x^2 + y^3", NULL, NULL, 0, 0, &r);
    printf("bad input -> status %d, msg contains 'homog': %s\n", (int)bad, bsr_last_error_message());
    char *json = NULL;
    if (bsr_spectrum_json("2/11,3/11", &json) == BSR_STATUS_OK) { printf("spectrum json head: %.40s...\n", json); bsr_string_free(json); }
    return 0;
}
