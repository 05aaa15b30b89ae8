#include "bwkb/bwkb.h"

#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "bwkb/cell_spectrum.hpp"
#include "bwkb/experiment.hpp"

struct bwkb_medium {
  bwkb::MediumSpec spec;
};

struct bwkb_branch {
  std::shared_ptr<const bwkb::DispersionBranch> branch;
};

namespace {

thread_local std::string last_error;

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <class F>
bwkb_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return BWKB_OK;
  } catch (const bwkb::Error& e) {
    last_error = e.what();
    return static_cast<bwkb_status>(static_cast<int>(e.code()));
  } catch (const nlohmann::json::exception& e) {
    last_error = e.what();
    return BWKB_SCHEMA;
  } catch (const std::exception& e) {
    last_error = e.what();
    return BWKB_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return BWKB_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) bwkb::fail(bwkb::ErrorCode::invalid_argument, what);
}

}  // namespace

extern "C" {

const char* bwkb_version(void) { return bwkb::tool_version(); }

const char* bwkb_last_error(void) { return last_error.c_str(); }

const char* bwkb_status_name(bwkb_status status) {
  if (status == BWKB_OK) return "ok";
  if (status == BWKB_INTERNAL) return "internal";
  if (status >= BWKB_INVALID_ARGUMENT && status <= BWKB_VALIDATION_FAILED)
    return bwkb::error_code_name(static_cast<bwkb::ErrorCode>(status));
  return "unknown";
}

void bwkb_free_string(char* s) { std::free(s); }

bwkb_status bwkb_run_experiment(const char* config_json, int* exit_code, char** result_json) {
  return guarded([&] {
    require(config_json && exit_code, "config_json and exit_code must not be null");
    bwkb::ExperimentResult r;
    try {
      r = bwkb::run_experiment(bwkb::parse_config(config_json));
    } catch (const bwkb::Error& e) {
      r.code = bwkb::exit_code_for(e.code());
      r.summary = std::string(bwkb::error_code_name(e.code())) + ": " + e.what();
    }
    *exit_code = static_cast<int>(r.code);
    if (result_json) {
      nlohmann::json j = {{"exit_code", *exit_code}, {"output_dir", r.output_dir}, {"files", r.files}, {"summary", r.summary}};
      *result_json = copy_string(j.dump());
    }
  });
}

bwkb_status bwkb_validate_config(const char* config_json) {
  return guarded([&] {
    require(config_json, "config_json must not be null");
    bwkb::validate_config(bwkb::parse_config(config_json));
  });
}

bwkb_status bwkb_medium_create(const char* medium_json, bwkb_medium** out) {
  return guarded([&] {
    require(medium_json && out, "medium_json and out must not be null");
    *out = nullptr;
    auto m = std::make_unique<bwkb_medium>();
    m->spec = bwkb::parse_medium(bwkb::parse_config(medium_json));
    *out = m.release();
  });
}

void bwkb_medium_destroy(bwkb_medium* medium) { delete medium; }

bwkb_status bwkb_medium_frequencies(const bwkb_medium* medium, double xi, int count, double* omega) {
  return guarded([&] {
    require(medium && omega && count > 0, "medium and omega must not be null and count must be positive");
    require(xi >= -bwkb::kPi && xi < bwkb::kPi, "xi must lie in [-pi, pi)");
    if (medium->spec.kind == "high_contrast") {
      const auto edges = bwkb::hc_band_edges_upto(count - 1, medium->spec.hc);
      for (int n = 0; n < count; ++n) omega[n] = bwkb::hc_solve_in_band(n, xi, edges[n], medium->spec.hc).omega;
    } else {
      const auto pairs = bwkb::solve_bloch(medium->spec.coeff, xi, 0.0, count);
      for (int n = 0; n < count; ++n) omega[n] = pairs.at(n).omega;
    }
  });
}

bwkb_status bwkb_medium_band_edges(const bwkb_medium* medium, int n, double* lo, double* hi) {
  return guarded([&] {
    require(medium && lo && hi && n >= 0, "medium, lo and hi must not be null and n must be nonnegative");
    if (medium->spec.kind != "high_contrast")
      bwkb::fail(bwkb::ErrorCode::unsupported, "band edges are available for high-contrast media only");
    const auto b = bwkb::hc_band_edges(n, medium->spec.hc);
    *lo = b.lo;
    *hi = b.hi;
  });
}

bwkb_status bwkb_branch_create(const bwkb_medium* medium, int n, int points, bwkb_branch** out) {
  return guarded([&] {
    require(medium && out, "medium and out must not be null");
    *out = nullptr;
    auto b = std::make_unique<bwkb_branch>();
    b->branch = bwkb::make_branch(medium->spec, n, points);
    *out = b.release();
  });
}

void bwkb_branch_destroy(bwkb_branch* branch) { delete branch; }

bwkb_status bwkb_branch_jet(const bwkb_branch* branch, double t, double xi, double jet[3]) {
  return guarded([&] {
    require(branch && jet, "branch and jet must not be null");
    const auto j = branch->branch->jet(t, xi);
    jet[0] = j.omega;
    jet[1] = j.omega_xi;
    jet[2] = j.omega_xixi;
  });
}

bwkb_status bwkb_branch_mode(const bwkb_branch* branch, double t, double xi, const double* y, size_t count, double* re,
                             double* im) {
  return guarded([&] {
    require(branch && y && re && im, "branch, y, re and im must not be null");
    std::vector<std::complex<double>> v(count);
    branch->branch->mode_values(t, xi, std::span<const double>(y, count), v.data());
    for (size_t i = 0; i < count; ++i) {
      re[i] = v[i].real();
      im[i] = v[i].imag();
    }
  });
}

}  // extern "C"
