// Copyright 2026 The gossipsim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gossip {

enum class ErrorCode {
    // graph
    NotStochastic,
    NegativeEntry,
    NonzeroDiagonal,
    TooSmall,
    NotSquare,
    NonFiniteEntry,
    Disconnected,
    DisconnectedAfterRetries,
    EigenFailure,
    // configuration
    BadParameter,
    BadConfig,
    BadAxis,
    BadHorizon,
    UnsupportedSchedule,
    // runtime
    NonFiniteState,
    InternalInconsistency,
    Io,
};

constexpr std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::NotStochastic: return "NotStochastic";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::NonzeroDiagonal: return "NonzeroDiagonal";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::DisconnectedAfterRetries: return "DisconnectedAfterRetries";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::BadParameter: return "BadParameter";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::BadAxis: return "BadAxis";
    case ErrorCode::BadHorizon: return "BadHorizon";
    case ErrorCode::UnsupportedSchedule: return "UnsupportedSchedule";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::InternalInconsistency: return "InternalInconsistency";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

/// True for codes that mean "the user's input is wrong" (CLI exit 2).
constexpr bool is_config_error(ErrorCode code)
{
    switch (code) {
    case ErrorCode::NonFiniteState:
    case ErrorCode::InternalInconsistency:
    case ErrorCode::EigenFailure:
    case ErrorCode::Io:
        return false;
    default:
        return true;
    }
}

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace gossip
