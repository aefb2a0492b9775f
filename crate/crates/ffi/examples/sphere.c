/* Minimise a 4-D sphere through the ask/tell interface. */
#include <stdio.h>
#include "msn.h"

#define DIM 4
#define POOL 50

static double sphere(const double *x) {
    double s = 0.0;
    for (int i = 0; i < DIM; i++) s += (x[i] - 1.0) * (x[i] - 1.0);
    return s;
}

int main(void) {
    double pool[POOL * DIM], cand[DIM], rewards[POOL], best;
    for (int i = 0; i < POOL * DIM; i++) pool[i] = (double)((i * 37) % 101) / 101.0 * 8.0 - 4.0;

    MsnConfigHandle *cfg = msn_config_default();
    MsnOptimizer *opt = NULL;
    if (msn_optimizer_new_with_pool(cfg, pool, POOL, DIM, 7, &opt) != MSN_STATUS_OK) {
        fprintf(stderr, "%s\n", msn_last_error());
        return 1;
    }
    for (int g = 0; g < 100; g++) {
        for (int i = 0; i < POOL; i++) {
            msn_optimizer_candidate(opt, i, cand, DIM);
            rewards[i] = -sphere(cand);
        }
        if (msn_optimizer_tell(opt, rewards, POOL) != MSN_STATUS_OK) {
            fprintf(stderr, "%s\n", msn_last_error());
            return 1;
        }
    }
    msn_optimizer_elite(opt, cand, DIM, &best);
    printf("best %g after %zu generations\n", -best, msn_optimizer_generation(opt));
    msn_optimizer_free(opt);
    msn_config_free(cfg);
    return 0;
}
