#include <math.h>
#include <stdio.h>
#include "homoconn.h"

int main(void) {
    HomoconnDims d;
    if (homoconn_dims(3, &d) != HOMOCONN_STATUS_OK) return 1;
    if (d.invariant != 9 || d.metric != 5 || d.skew != 3) return 2;

    HomoconnConnection *h = NULL;
    if (homoconn_connection_skew("s7", 1.0, true, 1.0, 0.0, 1e-8, &h) != HOMOCONN_STATUS_OK) return 3;
    HomoconnSummary s;
    if (homoconn_connection_summary(h, &s) != HOMOCONN_STATUS_OK) return 4;
    if (s.dim != 7 || s.einstein != HOMOCONN_EINSTEIN_EINSTEIN || s.curvature_max > 1e-9) return 5;

    double ric[49];
    size_t needed = 0;
    if (homoconn_connection_sym_ricci(h, ric, 49, &needed) != HOMOCONN_STATUS_OK || needed != 49) return 6;
    for (int i = 0; i < 49; i++)
        if (fabs(ric[i]) > 1e-9) return 7;

    char *json = homoconn_connection_json(h);
    if (json == NULL) return 8;
    homoconn_string_free(json);
    homoconn_connection_free(h);

    if (homoconn_connection_skew("s3", 0.5, true, 1.0, 0.0, 1e-8, &h) != HOMOCONN_STATUS_INVALID_ARGUMENT) return 9;
    char *err = homoconn_last_error();
    if (err == NULL) return 10;
    printf("expected error: %s\n", err);
    homoconn_string_free(err);
    return 0;
}
