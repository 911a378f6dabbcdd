#pragma once

#include <cassert>
#include <string>
#include <utility>
#include <variant>

namespace huro {

// Error value carrying a module-specific code and a human-readable detail.
template <class Code>
struct Error {
  Code code;
  std::string detail;

  bool operator==(const Error&) const = default;
};

// Minimal expected-like holder: either a value or an Error<Code>.
template <class T, class Code>
class Result {
 public:
  Result(T value) : v_(std::move(value)) {}            // NOLINT(google-explicit-constructor)
  Result(Error<Code> error) : v_(std::move(error)) {}  // NOLINT(google-explicit-constructor)

  bool ok() const { return v_.index() == 0; }
  explicit operator bool() const { return ok(); }

  const T& value() const& {
    assert(ok());
    return std::get<0>(v_);
  }
  T& value() & {
    assert(ok());
    return std::get<0>(v_);
  }
  T&& value() && {
    assert(ok());
    return std::get<0>(std::move(v_));
  }
  const Error<Code>& error() const {
    assert(!ok());
    return std::get<1>(v_);
  }

  const T& operator*() const& { return value(); }
  T& operator*() & { return value(); }
  const T* operator->() const { return &value(); }
  T* operator->() { return &value(); }

 private:
  std::variant<T, Error<Code>> v_;
};

}  // namespace huro
