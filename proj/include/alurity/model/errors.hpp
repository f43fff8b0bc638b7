#pragma once

#include <stdexcept>
#include <string>

namespace alurity {

class UnknownEndpoint : public std::runtime_error {
public:
    explicit UnknownEndpoint(const std::string& name)
        : std::runtime_error("unknown endpoint '" + name + "'"), name_(name) {}

    const std::string& name() const { return name_; }

private:
    std::string name_;
};

/// A caller broke an operation's documented precondition.
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace alurity
