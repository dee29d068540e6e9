#pragma once

#include <stdexcept>
#include <string>

namespace vmc {

// The sampler landed on a state whose marginal mass is zero. On valid inputs
// this event has probability zero, so reaching it means the marginal sequence
// handed to the kernel was corrupted.
struct InternalUnreachableState : std::logic_error {
    explicit InternalUnreachableState(const std::string& what) : std::logic_error(what) {}
};

struct ConditioningEventUnobserved : std::runtime_error {
    explicit ConditioningEventUnobserved(const std::string& what) : std::runtime_error(what) {}
};

struct MembershipViolation : std::runtime_error {
    explicit MembershipViolation(const std::string& what) : std::runtime_error(what) {}
};

struct SingularSystem : std::runtime_error {
    explicit SingularSystem(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace vmc
