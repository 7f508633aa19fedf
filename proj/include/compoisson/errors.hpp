#pragma once

#include <stdexcept>
#include <string>

namespace compoisson {

// Runtime numeric failures that a caller may want to dispatch on.
// `kind` is a stable machine-readable tag (it ends up in CLI error output).
class numeric_error : public std::runtime_error {
public:
    numeric_error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

namespace errkind {
inline constexpr const char* overflow = "overflow";
inline constexpr const char* divergence = "divergence";
inline constexpr const char* existence = "existence";
inline constexpr const char* rsp_violation = "rsp-violation";
inline constexpr const char* non_finite_information = "non-finite-information";
inline constexpr const char* tail_too_heavy = "tail-too-heavy";
inline constexpr const char* zero_mass_at_origin = "zero-mass-at-origin";
inline constexpr const char* pseudo_parameters = "pseudo-parameters";
inline constexpr const char* window_mass = "window-mass";
inline constexpr const char* zero_probability_sum = "zero-probability-sum";
}  // namespace errkind

[[noreturn]] inline void throw_numeric(const char* kind, const std::string& what) {
    throw numeric_error(kind, what);
}

// Parameter-domain violations map to std::invalid_argument; the message names
// the violated invariant so the CLI can surface it as a usage error.
inline void require_arg(bool ok, const std::string& invariant) {
    if (!ok) throw std::invalid_argument("invariant violated: " + invariant);
}

}  // namespace compoisson
