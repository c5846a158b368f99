#pragma once

#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace mc {

// Base for all tool errors; `phase` tags where in the pipeline it happened.
class Error : public std::runtime_error {
public:
  Error(std::string phase, const std::string& msg)
      : std::runtime_error(phase + ": " + msg), phase_(std::move(phase)) {}
  const std::string& phase() const { return phase_; }

private:
  std::string phase_;
};

#define MC_DEFINE_ERROR(NAME, PHASE)                                      \
  class NAME : public Error {                                             \
  public:                                                                 \
    explicit NAME(const std::string& msg) : Error(PHASE, msg) {}          \
  }

MC_DEFINE_ERROR(ParseError, "parse");
MC_DEFINE_ERROR(UnknownSymbol, "symbols");
MC_DEFINE_ERROR(ExtractionFault, "extract");
MC_DEFINE_ERROR(BackendUnavailable, "compile");
MC_DEFINE_ERROR(CompileFailed, "compile");
MC_DEFINE_ERROR(RunFailed, "profile");
MC_DEFINE_ERROR(EmptySamples, "profile");
MC_DEFINE_ERROR(ProviderUnavailable, "profile");
MC_DEFINE_ERROR(ZeroInstructions, "features");
MC_DEFINE_ERROR(NoAllowedTarget, "train");
MC_DEFINE_ERROR(DegenerateDataset, "train");
MC_DEFINE_ERROR(SchemaMismatch, "predict");
MC_DEFINE_ERROR(VersionMismatch, "model");
MC_DEFINE_ERROR(CorruptModel, "model");
MC_DEFINE_ERROR(LinkFailed, "link");
MC_DEFINE_ERROR(ToolUnavailable, "energy");
MC_DEFINE_ERROR(UsageError, "cli");
MC_DEFINE_ERROR(IoError, "io");
MC_DEFINE_ERROR(MismatchedKeys, "report");
MC_DEFINE_ERROR(NonpositiveTime, "report");

#undef MC_DEFINE_ERROR

// Collects warnings from any pipeline stage. Thread-safe; the driver prints
// the accumulated list at the end of a run. Deep utility code reports through
// the process-wide instance so callers need not thread a sink everywhere.
class Diag {
public:
  static Diag& global() {
    static Diag d;
    return d;
  }
  void warn(const std::string& msg) {
    std::lock_guard<std::mutex> lock(mu_);
    warnings_.push_back(msg);
  }
  std::vector<std::string> warnings() const {
    std::lock_guard<std::mutex> lock(mu_);
    return warnings_;
  }
  size_t count() const {
    std::lock_guard<std::mutex> lock(mu_);
    return warnings_.size();
  }
  void clear() {
    std::lock_guard<std::mutex> lock(mu_);
    warnings_.clear();
  }

private:
  mutable std::mutex mu_;
  std::vector<std::string> warnings_;
};

}  // namespace mc
