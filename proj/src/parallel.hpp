#pragma once

#include "mfforge/common.hpp"

#include <exception>

namespace mfforge::detail {

/// Runs body(i) for i in [begin, end). The parallel path uses an OpenMP
/// loop; an exception from any iteration is rethrown after the loop, the
/// one with the lowest index winning so both paths report the same error.
template <class Body>
void for_range(long begin, long end, Execution exec, Body&& body, int chunk = 16)
{
    if (exec == Execution::serial) {
        for (long i = begin; i < end; ++i)
            body(i);
        return;
    }
    std::exception_ptr failure;
    long failed = end;
#pragma omp parallel for schedule(dynamic, chunk)
    for (long i = begin; i < end; ++i) {
        try {
            body(i);
        }
        catch (...) {
#pragma omp critical(mfforge_for_range)
            if (i < failed) {
                failed = i;
                failure = std::current_exception();
            }
        }
    }
    if (failure)
        std::rethrow_exception(failure);
}

} // namespace mfforge::detail
