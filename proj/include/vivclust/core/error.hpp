#pragma once

#include <stdexcept>
#include <string>

namespace vivclust {

// Error categories map one-to-one onto the CLI exit codes.
enum class ErrorKind { Validation, Numerical, Io };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline Error validation_error(const std::string& what) {
    return Error(ErrorKind::Validation, what);
}
inline Error numerical_error(const std::string& what) {
    return Error(ErrorKind::Numerical, what);
}
inline Error io_error(const std::string& what) {
    return Error(ErrorKind::Io, what);
}

inline int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Validation: return 2;
        case ErrorKind::Numerical: return 3;
        case ErrorKind::Io: return 4;
    }
    return 1;
}

}  // namespace vivclust
