#pragma once

#include <stdexcept>
#include <string>

namespace burg {

enum class Err {
  config_invalid,
  io_error,
  minimizer_not_bracketed,
  quadrature_fail,
  root_not_converged,
  merge_ambiguous,
  shock_event_at_t,
  t0_too_late,
  out_of_support,
  empty_bin,
  underflow_all_weights,
  atom_window_overlap,
  step_too_coarse,
  no_shock,
  degenerate_data,
  variance_blowup,
};

inline const char* err_name(Err e) {
  switch (e) {
    case Err::config_invalid:          return "CONFIG_INVALID";
    case Err::io_error:                return "IO_ERROR";
    case Err::minimizer_not_bracketed: return "MINIMIZER_NOT_BRACKETED";
    case Err::quadrature_fail:         return "QUADRATURE_FAIL";
    case Err::root_not_converged:      return "ROOT_NOT_CONVERGED";
    case Err::merge_ambiguous:         return "MERGE_AMBIGUOUS";
    case Err::shock_event_at_t:        return "SHOCK_EVENT_AT_T";
    case Err::t0_too_late:             return "T0_TOO_LATE";
    case Err::out_of_support:          return "OUT_OF_SUPPORT";
    case Err::empty_bin:               return "EMPTY_BIN";
    case Err::underflow_all_weights:   return "UNDERFLOW_ALL_WEIGHTS";
    case Err::atom_window_overlap:     return "ATOM_WINDOW_OVERLAP";
    case Err::step_too_coarse:         return "STEP_TOO_COARSE";
    case Err::no_shock:                return "NO_SHOCK";
    case Err::degenerate_data:         return "DEGENERATE_DATA";
    case Err::variance_blowup:         return "VARIANCE_BLOWUP";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& what)
      : std::runtime_error(std::string(err_name(code)) + ": " + what), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool ok, Err code, const std::string& msg) {
  if (!ok) fail(code, msg);
}

}  // namespace burg
