#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace circleconj {

/// Base class of every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define CIRCLECONJ_DEFINE_ERROR(Name)                                    \
    class Name : public Error {                                          \
    public:                                                              \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

CIRCLECONJ_DEFINE_ERROR(InvalidParams);
CIRCLECONJ_DEFINE_ERROR(OutOfRange);
CIRCLECONJ_DEFINE_ERROR(BadDistribution);
CIRCLECONJ_DEFINE_ERROR(SeriesDiverges);
CIRCLECONJ_DEFINE_ERROR(DiniViolated);
CIRCLECONJ_DEFINE_ERROR(InsufficientRange);
CIRCLECONJ_DEFINE_ERROR(NotADiffeo);
CIRCLECONJ_DEFINE_ERROR(NoConvergence);
CIRCLECONJ_DEFINE_ERROR(QuadratureFailure);
CIRCLECONJ_DEFINE_ERROR(DegenerateConfiguration);
CIRCLECONJ_DEFINE_ERROR(NonMonotone);
CIRCLECONJ_DEFINE_ERROR(DepthUnavailable);
CIRCLECONJ_DEFINE_ERROR(DerivativeUnderflow);
CIRCLECONJ_DEFINE_ERROR(NonPositiveDerivative);
CIRCLECONJ_DEFINE_ERROR(NotAModulus);
CIRCLECONJ_DEFINE_ERROR(DepthExhausted);

#undef CIRCLECONJ_DEFINE_ERROR

/// Raised when fewer trustworthy items than requested could be produced.
/// `valid` is the length of the trustworthy prefix.
class PrefixError : public Error {
public:
    PrefixError(const std::string& what, std::size_t valid)
        : Error(what), valid_(valid) {}
    std::size_t valid() const noexcept { return valid_; }

private:
    std::size_t valid_;
};

class PrecisionExhausted : public PrefixError {
public:
    PrecisionExhausted(std::size_t valid)
        : PrefixError("PrecisionExhausted: only " + std::to_string(valid) +
                          " trustworthy partial quotients",
                      valid) {}
};

class IntegerOverflow : public PrefixError {
public:
    IntegerOverflow(std::size_t valid)
        : PrefixError("IntegerOverflow: convergent denominator exceeds int64 after " +
                          std::to_string(valid) + " quotients",
                      valid) {}
};

/// An exact (to working precision) return of the orbit: rational rotation number p/q.
class PeriodicOrbitDetected : public Error {
public:
    PeriodicOrbitDetected(long long period, long long winding)
        : Error("PeriodicOrbitDetected: period " + std::to_string(period)),
          period_(period), winding_(winding) {}
    long long period() const noexcept { return period_; }
    long long winding() const noexcept { return winding_; }

private:
    long long period_;
    long long winding_;
};

} // namespace circleconj
