#ifndef BWKB_H
#define BWKB_H

#include <stddef.h>

#if defined(BWKB_BUILDING_LIBRARY)
#define BWKB_API __attribute__((visibility("default")))
#else
#define BWKB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bwkb_status {
  BWKB_OK = 0,
  BWKB_INVALID_ARGUMENT = 1,
  BWKB_OUT_OF_RANGE = 2,
  BWKB_NON_CONVERGENCE = 3,
  BWKB_FLAT_BAND = 4,
  BWKB_BAND_GAP_QUERY = 5,
  BWKB_DEGENERATE = 6,
  BWKB_CAUSTIC = 7,
  BWKB_INSTABILITY = 8,
  BWKB_IO = 9,
  BWKB_SCHEMA = 10,
  BWKB_UNSUPPORTED = 11,
  BWKB_VALIDATION_FAILED = 12,
  BWKB_INTERNAL = 99
} bwkb_status;

typedef struct bwkb_medium bwkb_medium;
typedef struct bwkb_branch bwkb_branch;

BWKB_API const char* bwkb_version(void);
// Message of the last failed call on this thread; empty after success.
BWKB_API const char* bwkb_last_error(void);
BWKB_API const char* bwkb_status_name(bwkb_status status);
BWKB_API void bwkb_free_string(char* s);

// Runs one command from a JSON config. exit_code receives the process exit
// code (0 pass, 1 usage, 2 numerical, 3 validation); result_json (optional)
// receives {"exit_code", "output_dir", "files", "summary"}, freed with
// bwkb_free_string. Returns BWKB_OK whenever the command ran to a verdict.
BWKB_API bwkb_status bwkb_run_experiment(const char* config_json, int* exit_code, char** result_json);
// Checks a config without running it.
BWKB_API bwkb_status bwkb_validate_config(const char* config_json);

// medium_json: {"kind": "high_contrast", "h": .., "a2": ..}
//   | {"kind": "two_phase", "h": .., "a1": .., "a2": ..} | {"kind": "cell", "coefficient": {..}}
BWKB_API bwkb_status bwkb_medium_create(const char* medium_json, bwkb_medium** out);
BWKB_API void bwkb_medium_destroy(bwkb_medium* medium);
// Lowest count frequencies at quasimomentum xi in [-pi, pi), ascending.
BWKB_API bwkb_status bwkb_medium_frequencies(const bwkb_medium* medium, double xi, int count, double* omega);
// Band n occupies [lo, hi]; high-contrast media only.
BWKB_API bwkb_status bwkb_medium_band_edges(const bwkb_medium* medium, int n, double* lo, double* hi);

// points: quasimomentum grid size for cell media (ignored for high contrast).
BWKB_API bwkb_status bwkb_branch_create(const bwkb_medium* medium, int n, int points, bwkb_branch** out);
BWKB_API void bwkb_branch_destroy(bwkb_branch* branch);
// jet[0..2] = Omega, Omega_xi, Omega_xixi at (t, xi).
BWKB_API bwkb_status bwkb_branch_jet(const bwkb_branch* branch, double t, double xi, double jet[3]);
// Normalized cell mode at the cell coordinates y[0..count).
BWKB_API bwkb_status bwkb_branch_mode(const bwkb_branch* branch, double t, double xi, const double* y, size_t count,
                                      double* re, double* im);

#ifdef __cplusplus
}
#endif

#endif
