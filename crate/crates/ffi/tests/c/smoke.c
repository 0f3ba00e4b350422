#include <math.h>
#include <stdio.h>
#include <string.h>

#include "ghzv.h"

int main(void) {
    GhzvStrategy *s = NULL;
    if (ghzv_strategy_new("omega1", 3, 0, 0, NAN, NAN, NULL, 0, &s) != GHZV_STATUS_OK) {
        fprintf(stderr, "new: %s\n", ghzv_last_error());
        return 1;
    }
    GhzvSpectral sd;
    if (ghzv_strategy_spectral(s, &sd) != GHZV_STATUS_OK || fabs(sd.nu - 2.0 / 3.0) > 1e-9 || !sd.homogeneous) {
        return 2;
    }
    uint64_t n = 0;
    if (ghzv_num_tests(0.01, 0.01, sd.nu, &n) != GHZV_STATUS_OK || n != 689) {
        return 3;
    }
    GhzvRunSummary run;
    if (ghzv_simulate(s, "target", 1000, 1, &run) != GHZV_STATUS_OK || run.passes != 1000) {
        return 4;
    }
    ghzv_strategy_free(s);

    GhzvStrategy *bad = NULL;
    if (ghzv_strategy_new("omega2", 2, 9, 0, NAN, NAN, NULL, 0, &bad) != GHZV_STATUS_INVALID_ARGUMENT || bad != NULL) {
        return 5;
    }
    if (strstr(ghzv_last_error(), "odd prime") == NULL) {
        return 6;
    }
    printf("ok\n");
    return 0;
}
