/* Copyright 2026 nmrqip contributors */
/* SPDX-License-Identifier: Apache-2.0 */

#include <math.h>
#include <stdio.h>

#include "nmrqip.h"

int main(void) {
    NmrSpinSystem *sys = NULL;
    if (nmr_spin_system_preset("chloroform", &sys) != NMR_STATUS_OK) return 1;
    if (nmr_spin_system_num_spins(sys) != 2) return 2;

    NmrDensity *rho = NULL;
    double v = 0.0;
    if (nmr_pps_new(2, 0.5, &rho) != NMR_STATUS_OK) return 3;
    if (nmr_density_expectation_pauli(rho, "ZZ", &v) != NMR_STATUS_OK || fabs(v - 0.5) > 1e-12) return 4;

    if (nmr_spin_system_preset("nothing", &sys) != NMR_STATUS_INVALID_ARGUMENT) return 5;
    const char *msg = nmr_last_error_message();
    if (msg == NULL) return 6;
    printf("expected error: %s\n", msg);

    nmr_density_free(rho);
    nmr_spin_system_free(sys);
    puts("ok");
    return 0;
}
