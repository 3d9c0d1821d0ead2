#pragma once

// The model boundary: everything the pipeline asks of a language model goes
// through ModelAdapter::complete.

#include <atomic>
#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ec/error.hpp"

namespace ec::pipeline {

enum class Role { Classification, Elicitation, Formulation, Debug, Explanation, General };

std::string to_string(Role r);
std::optional<Role> parse_role(const std::string& s);

/// One prompt. `text` is the rendered template; `vars` are the raw template
/// inputs, which scripted adapters use to synthesize replies.
struct PromptRequest {
  Role role = Role::General;
  std::string text;
  std::size_t sample = 0;     // candidate index for Formulation/Debug
  std::size_t iteration = 0;  // debug round, classification retry, ...
  std::map<std::string, std::string> vars;
};

class AdapterTimeout : public Error {
 public:
  explicit AdapterTimeout(const std::string& message) : Error("AdapterTimeout", message) {}
};

class ModelAdapter {
 public:
  virtual ~ModelAdapter() = default;
  /// Must return exactly n texts. Implementations must tolerate concurrent calls.
  virtual std::vector<std::string> complete(const PromptRequest& request, std::size_t n) = 0;
  virtual std::size_t max_prompt_length() const { return 1u << 20; }
  virtual std::string name() const = 0;
};

/// Runs adapter.complete with a deadline; a zero timeout waits forever.
/// Throws AdapterTimeout on expiry and Error("AdapterContract") when the
/// adapter returns the wrong number of texts. A call that times out keeps
/// running on a detached thread, so the adapter must outlive it.
std::vector<std::string> call_with_timeout(ModelAdapter& adapter, const PromptRequest& request,
                                           std::size_t n, std::chrono::milliseconds timeout);

/// Forwards to another adapter while counting requests and returned texts.
class CountingAdapter : public ModelAdapter {
 public:
  explicit CountingAdapter(ModelAdapter& inner) : inner_(inner) {}

  std::vector<std::string> complete(const PromptRequest& request, std::size_t n) override;
  std::size_t max_prompt_length() const override { return inner_.max_prompt_length(); }
  std::string name() const override { return inner_.name(); }

  std::size_t requests() const noexcept { return requests_.load(); }
  std::size_t completions() const noexcept { return completions_.load(); }

 private:
  ModelAdapter& inner_;
  std::atomic<std::size_t> requests_{0};
  std::atomic<std::size_t> completions_{0};
};

}  // namespace ec::pipeline
