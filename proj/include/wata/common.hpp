#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace wata {

using StateId = int;
using ActionId = int;

// Bit set over states. Automata handled by the abstraction have at most 64 states.
using StateSet = std::uint64_t;

class ParseError : public std::runtime_error {
public:
    ParseError(int line, int column, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                             ": " + msg),
          line_(line), column_(column), message_(msg) {}
    int line() const { return line_; }
    int column() const { return column_; }
    const std::string& message() const { return message_; }

private:
    int line_;
    int column_;
    std::string message_;
};

// Raised when a computation exceeds its configured work budget.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when an operation is called outside its precondition.
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

inline int popcount(std::uint64_t x) { return std::popcount(x); }

inline bool subset_of(std::uint64_t a, std::uint64_t b) { return (a & ~b) == 0; }

inline std::size_t hash_mix(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

template <class F>
void for_each_bit(std::uint64_t x, F&& fn) {
    while (x) {
        int i = std::countr_zero(x);
        fn(i);
        x &= x - 1;
    }
}

}  // namespace wata
