#include <math.h>
#include <stdio.h>
#include "xydqpt.h"

int main(void) {
    XyQuench *q = NULL;
    if (xy_quench_new(0.5, 0.5, 0.5, 1.5, 10.0, -M_PI / 2, 0, &q) != XY_STATUS_OK) return 1;
    size_t count = 0;
    double k[4], e[4];
    if (xy_find_crossings(q, k, e, 4, &count) != XY_STATUS_OK || count != 1) return 2;
    double bc = 0.0;
    if (xy_critical_beta(q, &bc) != XY_STATUS_OK) return 3;
    xy_quench_free(q);

    double a[4] = {0.0, 3.0, -3.0, 0.0}, re = 0.0, im = 0.0;
    if (xy_pfaffian(a, NULL, 2, &re, &im) != XY_STATUS_OK || re != 3.0) return 4;
    if (xy_quench_new(0.5, 0.5, 0.5, 1.5, 1.0, 0.0, 3, &q) != XY_STATUS_INVALID_ARGUMENT) return 5;
    char msg[128];
    if (xy_last_error(msg, sizeof msg) == 0) return 6;
    printf("%s k*=%.6f beta_c=%g\n", xy_version(), k[0], bc);
    return 0;
}
