/* The public header must compile as C. */
#include "shearstab/shearstab.h"

#include <stdio.h>

int main(void) {
  sst_discretization_t* disc = NULL;
  sst_profile_t* profile = NULL;
  sst_eigen_t* eigen = NULL;
  sst_eigen_info info;
  int failed = 0;

  if (sst_discretization_create(32, &disc) != SST_OK) return 1;
  if (sst_profile_create(disc, SST_PROFILE_COUETTE, NULL, 0, &profile) != SST_OK) return 1;
  if (sst_energy_solve(profile, SST_ENERGY_SPANWISE, 1.9, 0.0, &eigen) != SST_OK) return 1;
  sst_eigen_get_info(eigen, &info);
  if (!(info.reynolds_critical > 44.0 && info.reynolds_critical < 45.0)) failed = 1;
  printf("Re(a = 1.9) = %.8f\n", info.reynolds_critical);
  sst_eigen_destroy(eigen);
  sst_profile_destroy(profile);
  sst_discretization_destroy(disc);
  return failed;
}
