// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
#include "sebcom/error.hpp"

namespace sebcom {

const char* error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
        case ErrorCode::Io: return "IO";
        case ErrorCode::Format: return "FORMAT";
        case ErrorCode::Corrupt: return "CORRUPT";
        case ErrorCode::KbMismatch: return "KB_MISMATCH";
        case ErrorCode::Stale: return "STALE";
        case ErrorCode::Construction: return "CONSTRUCTION";
        case ErrorCode::Internal: return "INTERNAL";
    }
    return "UNKNOWN";
}

}  // namespace sebcom
