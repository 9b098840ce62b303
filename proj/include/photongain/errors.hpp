#ifndef PHOTONGAIN_ERRORS_HPP
#define PHOTONGAIN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pg {

// Error taxonomy shared by every module.  Each class corresponds to one
// failure mode named in the interface contracts; the CLI maps them onto
// exit codes (usage=2, domain/pole=3, convergence/constraint=4).

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Evaluation requested at a genuine pole of a gamma ratio.
struct PoleError : Error {
  using Error::Error;
};

// Argument outside the real domain a contract admits.
struct DomainError : Error {
  using Error::Error;
};

// A series or integral that provably diverges for the given arguments.
struct DivergenceError : Error {
  using Error::Error;
};

// An iteration failed to meet its tolerance within the hard cap.
struct ConvergenceError : Error {
  using Error::Error;
};

// Moment/series convergence constraints of a theorem are violated
// (distinct from DomainError: the point is representable, the formula
// simply has no finite value there).
struct ConstraintError : Error {
  using Error::Error;
};

// Exact coefficient table indexed outside its precomputed range.
struct RangeError : Error {
  using Error::Error;
};

// 2-D array shape mismatch in the streaming pipeline.
struct ShapeError : Error {
  using Error::Error;
};

// Data-collection loop exceeded its configured frame cap.
struct IterationCapError : Error {
  using Error::Error;
};

}  // namespace pg

#endif  // PHOTONGAIN_ERRORS_HPP
