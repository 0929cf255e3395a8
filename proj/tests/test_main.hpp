#pragma once
// Shared doctest entry point: each test binary defines the implementation once.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "nadyn/error.hpp"

// Checks that expr throws nadyn::Error carrying the given code.
#define CHECK_THROWS_AS_CODE(expr, expected)                                                \
    do {                                                                                    \
        bool thrown_ = false;                                                               \
        try {                                                                               \
            static_cast<void>(expr);                                                        \
        } catch (const nadyn::Error& e_) {                                                  \
            thrown_ = true;                                                                 \
            CHECK(e_.code() == (expected));                                                 \
        }                                                                                   \
        CHECK_MESSAGE(thrown_, #expr " did not throw");                                     \
    } while (false)
