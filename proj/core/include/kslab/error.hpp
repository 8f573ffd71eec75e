#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace kslab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Kernel evaluated at its singular point.
class SingularityError : public Error {
 public:
  using Error::Error;
};

class DegenerateFitError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class BlowUpError : public Error {
 public:
  BlowUpError(std::size_t particle, std::uint64_t step)
      : Error("non-finite coordinate for particle " + std::to_string(particle) +
              " at step " + std::to_string(step)),
        particle_(particle),
        step_(step) {}

  std::size_t particle() const noexcept { return particle_; }
  std::uint64_t step() const noexcept { return step_; }

 private:
  std::size_t particle_;
  std::uint64_t step_;
};

class OutOfDomainError : public Error {
 public:
  using Error::Error;
};

class StepSizeError : public Error {
 public:
  StepSizeError(const std::string& what, double suggested_dt)
      : Error(what), suggested_dt_(suggested_dt) {}

  double suggested_dt() const noexcept { return suggested_dt_; }

 private:
  double suggested_dt_;
};

}  // namespace kslab
