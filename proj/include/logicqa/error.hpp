// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace logicqa {

/// Broad failure classes. The CLI maps these onto process exit codes.
enum class ErrorKind {
    config,
    dataset,
    template_error,
    backend,
    transport,
    fixture_missing,
    validation,
    parse,
    empty_question_set,
    metric,
    undefined,
    io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Upstream replied with a non-retryable HTTP status.
class BackendError : public Error {
public:
    BackendError(int status, const std::string& message)
        : Error(ErrorKind::backend, message), status_(status) {}

    int status() const noexcept { return status_; }

private:
    int status_;
};

/// An error raised inside a pipeline stage, tagged with the stage name
/// ("describe", "summarize", ...) so operators can tell where a run stopped.
class StageError : public Error {
public:
    StageError(std::string stage, const Error& cause)
        : Error(cause.kind(), "[" + stage + "] " + cause.what()), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace logicqa
