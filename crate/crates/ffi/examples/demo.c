/* Computes the gap of the 5-cycle through the C interface. */
#include <stdio.h>

#include "negtype.h"

int main(void) {
    NtMetric *metric = NULL;
    NtAnalysis *analysis = NULL;
    NtStatus st = nt_metric_cycle(5, &metric);
    if (st != NT_STATUS_OK) {
        fprintf(stderr, "error %d: %s\n", (int)st, nt_last_error());
        return 1;
    }
    NtGapOptions opts = nt_gap_options_default();
    opts.parallel = false;
    st = nt_analyze(metric, 1.0, &opts, &analysis);
    if (st != NT_STATUS_OK) {
        fprintf(stderr, "error %d: %s\n", (int)st, nt_last_error());
        nt_metric_free(metric);
        return 1;
    }
    double gamma = 0.0, beta = 0.0;
    int8_t signs[5];
    nt_analysis_gamma(analysis, &gamma);
    nt_analysis_beta(analysis, &beta);
    nt_analysis_sign_vector(analysis, signs, 5);
    printf("gamma %.17g\nbeta %.17g\nsigns", gamma, beta);
    for (int i = 0; i < 5; i++) {
        printf(" %d", signs[i]);
    }
    printf("\n");

    /* Error path: a triangle-inequality violation. */
    const double bad[9] = {0, 1, 5, 1, 0, 1, 5, 1, 0};
    NtMetric *rejected = NULL;
    st = nt_metric_from_matrix(bad, 3, &rejected);
    printf("status %d: %s\n", (int)st, nt_last_error());

    nt_analysis_free(analysis);
    nt_metric_free(metric);
    return 0;
}
