#pragma once

#include "common.hpp"

#include <doctest.h>

template <class F>
prlab::Status status_of(F&& f) {
    try {
        f();
    } catch (const prlab::Error& e) {
        return e.code();
    }
    return prlab::Status::ok;
}
