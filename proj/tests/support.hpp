#pragma once

#include <gtest/gtest.h>

#include <utility>

#include "rescomp/error.hpp"

namespace rescomp::check {

template <class F>
::testing::AssertionResult throws_code(ErrorCode expected, F&& fn) {
  try {
    std::forward<F>(fn)();
  } catch (const Error& e) {
    if (e.code() == expected) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << "threw " << e.name() << " (" << e.what() << "), expected "
                                         << to_string(expected);
  }
  return ::testing::AssertionFailure() << "did not throw, expected " << to_string(expected);
}

}  // namespace rescomp::check

#define EXPECT_RESCOMP_ERROR(code, stmt) \
  EXPECT_TRUE(::rescomp::check::throws_code(::rescomp::ErrorCode::code, [&] { stmt; }))
