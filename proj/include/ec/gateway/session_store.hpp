#pragma once

// Sessions keyed by random 128-bit ids, optionally snapshotted to one JSON
// file per session. A session is leased to one request at a time.

#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <set>
#include <string>

#include "ec/session.hpp"

namespace ec::gateway {

class SessionStore {
 public:
  /// Loads every `<id>.json` under `dir/sessions` when `dir` is non-empty.
  explicit SessionStore(std::filesystem::path dir = {}, std::chrono::seconds ttl = std::chrono::hours(24));

  /// 32 lowercase hex digits from the OS random source.
  static std::string new_id();

  std::string create();
  /// Copy of the stored session. Throws SessionNotFound / SessionExpired.
  pipeline::Session get(const std::string& id);

  /// Exclusive access for one request; the destructor releases it.
  class Lease {
   public:
    Lease(SessionStore& store, std::string id, pipeline::Session session)
        : store_(&store), id_(std::move(id)), session_(std::move(session)) {}
    Lease(Lease&& other) noexcept;
    Lease(const Lease&) = delete;
    Lease& operator=(const Lease&) = delete;
    Lease& operator=(Lease&&) = delete;
    ~Lease();

    pipeline::Session& session() { return session_; }
    /// Stores the (modified) session and writes its snapshot.
    void commit();

   private:
    SessionStore* store_;
    std::string id_;
    pipeline::Session session_;
  };

  /// Throws SessionNotFound, SessionExpired or SessionBusy (another request
  /// holds the session).
  Lease acquire(const std::string& id);

  /// Appends each trace of `s` to `<dir>/traces.jsonl`; no-op in memory mode.
  void append_traces(const pipeline::Session& s);

  std::size_t size();
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  void put(const pipeline::Session& s);
  void release(const std::string& id);
  void write_snapshot(const pipeline::Session& s);
  /// Throws SessionExpired (dropping the session) when it is past its TTL.
  void check_expiry(std::map<std::string, pipeline::Session>::iterator it);

  std::filesystem::path dir_;
  std::chrono::seconds ttl_;
  std::mutex mu_;
  std::map<std::string, pipeline::Session> sessions_;
  std::set<std::string> leased_;
};

}  // namespace ec::gateway
