#include "ec/adapter.hpp"

#include <future>
#include <thread>

namespace ec::pipeline {

namespace {
constexpr std::pair<Role, const char*> kRoles[] = {
    {Role::Classification, "classification"}, {Role::Elicitation, "elicitation"},
    {Role::Formulation, "formulation"},       {Role::Debug, "debug"},
    {Role::Explanation, "explanation"},       {Role::General, "general"},
};
}  // namespace

std::string to_string(Role r) {
  for (const auto& [role, name] : kRoles)
    if (role == r) return name;
  return "unknown";
}

std::optional<Role> parse_role(const std::string& s) {
  for (const auto& [role, name] : kRoles)
    if (s == name) return role;
  return std::nullopt;
}

std::vector<std::string> call_with_timeout(ModelAdapter& adapter, const PromptRequest& request,
                                           std::size_t n, std::chrono::milliseconds timeout) {
  std::vector<std::string> out;
  if (timeout.count() <= 0) {
    out = adapter.complete(request, n);
  } else {
    auto promise = std::make_shared<std::promise<std::vector<std::string>>>();
    auto future = promise->get_future();
    std::thread([&adapter, request, n, promise] {
      try {
        promise->set_value(adapter.complete(request, n));
      } catch (...) {
        promise->set_exception(std::current_exception());
      }
    }).detach();
    if (future.wait_for(timeout) != std::future_status::ready)
      throw AdapterTimeout(adapter.name() + " did not answer the " + to_string(request.role) +
                           " prompt within " + std::to_string(timeout.count()) + " ms");
    out = future.get();
  }
  if (out.size() != n)
    throw Error("AdapterContract", adapter.name() + " returned " + std::to_string(out.size()) +
                                       " texts, expected " + std::to_string(n));
  return out;
}

std::vector<std::string> CountingAdapter::complete(const PromptRequest& request, std::size_t n) {
  ++requests_;
  completions_ += n;
  return inner_.complete(request, n);
}

}  // namespace ec::pipeline
