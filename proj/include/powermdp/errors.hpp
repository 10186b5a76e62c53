#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace powermdp {

/// Base class for every domain error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class LookupError : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The MDP fails its structural invariants (see validate()).
class InvalidMdp : public Error {
public:
    using Error::Error;
};

class EnumerationTooLarge : public Error {
public:
    using Error::Error;
};

/// A linear solve or LP did not meet its residual budget.
class NumericFailure : public Error {
public:
    using Error::Error;
};

class UnsupportedStructure : public Error {
public:
    using Error::Error;
};

/// The shift grid was too coarse to separate neighbouring breakpoints.
class ResolutionError : public Error {
public:
    using Error::Error;
};

class Indeterminate : public Error {
public:
    using Error::Error;
};

class PreconditionViolation : public Error {
public:
    using Error::Error;
};

/// Raised when a user supplied policy-generating callback throws.
class PolicyGeneratorError : public Error {
public:
    PolicyGeneratorError(std::uint64_t sample_index, const std::string& what)
        : Error("policy generator failed at sample " + std::to_string(sample_index) + ": " + what),
          sample_index_(sample_index) {}

    std::uint64_t sample_index() const noexcept { return sample_index_; }

private:
    std::uint64_t sample_index_;
};

} // namespace powermdp
