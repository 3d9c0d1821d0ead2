#include "ec/gateway/session_store.hpp"

#include <cstdio>
#include <fstream>
#include <random>

#include "ec/pipeline.hpp"

namespace ec::gateway {

namespace fs = std::filesystem;

SessionStore::SessionStore(fs::path dir, std::chrono::seconds ttl) : dir_(std::move(dir)), ttl_(ttl) {
  if (dir_.empty()) return;
  fs::create_directories(dir_ / "sessions");
  for (const auto& entry : fs::directory_iterator(dir_ / "sessions")) {
    if (entry.path().extension() != ".json") continue;
    std::ifstream f(entry.path());
    try {
      auto s = pipeline::session_from_json(nlohmann::json::parse(f));
      sessions_[s.id] = std::move(s);
    } catch (const std::exception& e) {
      throw Error("BadSnapshot", entry.path().string() + ": " + e.what());
    }
  }
}

std::string SessionStore::new_id() {
  std::random_device rd;
  std::string out;
  for (int i = 0; i < 4; ++i) {
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(rd()));
    out += buf;
  }
  return out;
}

std::string SessionStore::create() {
  auto s = pipeline::new_session(new_id());
  std::lock_guard lock(mu_);
  while (sessions_.count(s.id)) s.id = new_id();
  sessions_[s.id] = s;
  write_snapshot(s);
  return s.id;
}

void SessionStore::check_expiry(std::map<std::string, pipeline::Session>::iterator it) {
  const auto now = std::chrono::duration_cast<std::chrono::seconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
  if (now - it->second.updated_at <= ttl_.count()) return;
  const std::string id = it->first;
  sessions_.erase(it);
  if (!dir_.empty()) fs::remove(dir_ / "sessions" / (id + ".json"));
  throw Error("SessionExpired", "session " + id + " has expired");
}

pipeline::Session SessionStore::get(const std::string& id) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error("SessionNotFound", "no session with id '" + id + "'");
  check_expiry(it);
  return it->second;
}

SessionStore::Lease SessionStore::acquire(const std::string& id) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error("SessionNotFound", "no session with id '" + id + "'");
  check_expiry(it);
  if (leased_.count(id)) throw Error("SessionBusy", "another message for this session is still being processed");
  leased_.insert(id);
  return Lease(*this, id, it->second);
}

SessionStore::Lease::Lease(Lease&& other) noexcept
    : store_(other.store_), id_(std::move(other.id_)), session_(std::move(other.session_)) {
  other.store_ = nullptr;
}

SessionStore::Lease::~Lease() {
  if (store_) store_->release(id_);
}

void SessionStore::Lease::commit() { store_->put(session_); }

void SessionStore::put(const pipeline::Session& s) {
  std::lock_guard lock(mu_);
  sessions_[s.id] = s;
  write_snapshot(s);
}

void SessionStore::release(const std::string& id) {
  std::lock_guard lock(mu_);
  leased_.erase(id);
}

void SessionStore::write_snapshot(const pipeline::Session& s) {
  if (dir_.empty()) return;
  const auto final_path = dir_ / "sessions" / (s.id + ".json");
  const auto tmp = final_path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("WriteFailed", "cannot write " + tmp);
    out << pipeline::to_json(s).dump(2);
  }
  fs::rename(tmp, final_path);
}

void SessionStore::append_traces(const pipeline::Session& s) {
  if (dir_.empty() || s.traces.empty()) return;
  std::lock_guard lock(mu_);
  std::ofstream out(dir_ / "traces.jsonl", std::ios::app | std::ios::binary);
  for (const auto& t : s.traces) {
    auto j = pipeline::to_json(t);
    nlohmann::ordered_json line;
    line["session_id"] = s.id;
    line["kind"] = s.kind ? problems::to_string(*s.kind) : "";
    for (auto& [k, v] : j.items()) line[k] = v;
    out << line.dump() << "\n";
  }
}

std::size_t SessionStore::size() {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

}  // namespace ec::gateway
