/* Exercises the C header end to end against the static library. */
#include <stdio.h>
#include <string.h>

#include "cherednik.h"

int main(void) {
    ChdDataSet *ds = NULL;
    if (chd_dataset_open(NULL, &ds) != CHD_STATUS_OK) {
        fprintf(stderr, "open: %s\n", chd_last_error_message());
        return 10;
    }
    if (chd_dataset_block_count(ds) <= 0) return 11;

    ChdReport *r = NULL;
    if (chd_solve(ds, "F4/c_1_6/principal", true, 0, &r) != CHD_STATUS_OK) return 12;
    char *json = chd_report_json(r);
    if (json == NULL || strstr(json, "\"unique\"") == NULL) return 13;
    chd_string_free(json);
    chd_report_free(r);

    r = NULL;
    if (chd_character(ds, "E8/c_1_5/block_8_z", "56_z", &r) != CHD_STATUS_OK) return 14;
    char *text = chd_report_text(r);
    if (text == NULL || strstr(text, "1728") == NULL) return 15;
    chd_string_free(text);
    chd_report_free(r);

    r = NULL;
    if (chd_verify(ds, "E8/c_1_4/no_such_block", &r) != CHD_STATUS_DATA_ERROR) return 16;
    if (chd_last_error_message() == NULL) return 17;
    chd_report_free(r);

    chd_dataset_free(ds);
    printf("ok %s\n", chd_version());
    return 0;
}
