#pragma once

#include <stdexcept>
#include <string>

namespace ivr {

/// Base class for every error raised by the library. `kind()` is a stable
/// machine-readable tag used in CLI error records.
class Error : public std::runtime_error
{
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind))
    {
    }
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

struct PoleProximity : Error
{
    explicit PoleProximity(const std::string& w) : Error("PoleProximity", w) {}
};

struct NoConvergence : Error
{
    explicit NoConvergence(const std::string& w) : Error("NoConvergence", w) {}
};

struct IncompleteSpectrum : Error
{
    explicit IncompleteSpectrum(const std::string& w) : Error("IncompleteSpectrum", w) {}
};

struct EigensolverFailure : Error
{
    explicit EigensolverFailure(const std::string& w) : Error("EigensolverFailure", w) {}
};

struct DegenerateFit : Error
{
    explicit DegenerateFit(const std::string& w) : Error("DegenerateFit", w) {}
};

struct ConfigError : Error
{
    explicit ConfigError(const std::string& w) : Error("ConfigError", w) {}
};

struct InvalidArgument : Error
{
    explicit InvalidArgument(const std::string& w) : Error("InvalidArgument", w) {}
};

} // namespace ivr
