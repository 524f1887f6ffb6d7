#pragma once

#include <stdexcept>
#include <string>

namespace hylip {

/// Base class for all domain errors thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// The requested gait parameters admit no periodic motion (v_bar/omega - r_bar <= 0).
class InfeasibleGait : public Error {
public:
    using Error::Error;
};

/// jump_map called on a state outside the jump set tolerance.
class NotInJumpSet : public Error {
public:
    using Error::Error;
};

/// Timer value outside the admissible range [-T, 2T].
class TimerOutOfRange : public Error {
public:
    using Error::Error;
};

/// Decay rate alpha does not exceed the pendulum frequency omega.
class AlphaTooSmall : public Error {
public:
    using Error::Error;
};

/// The LMI program has no solution (alpha <= omega).
class Infeasible : public Error {
public:
    using Error::Error;
};

/// The numerical solver failed to make progress.
class SolverFailure : public Error {
public:
    using Error::Error;
};

/// More jumps per second than the Zeno guard allows.
class ZenoGuardTripped : public Error {
public:
    using Error::Error;
};

/// residual_time horizon guard elapsed without reaching the step boundary.
class StepNeverCompletes : public Error {
public:
    using Error::Error;
};

/// The MPC quadratic program has an empty feasible set.
class QpInfeasible : public Error {
public:
    using Error::Error;
};

/// Malformed or incomplete configuration input.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace hylip
