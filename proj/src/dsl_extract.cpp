#include <sstream>
#include <vector>

#include "ec/dsl.hpp"

namespace ec::dsl {

namespace {

std::string rstrip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  return s;
}

std::string lstrip(const std::string& s) {
  std::size_t b = 0;
  while (b < s.size() && (s[b] == ' ' || s[b] == '\t')) ++b;
  return s.substr(b);
}

// Fence tag when `line` opens or closes a block; nullopt otherwise.
std::optional<std::string> fence_tag(const std::string& line) {
  const std::string t = lstrip(rstrip(line));
  if (t.rfind("```", 0) != 0) return std::nullopt;
  std::string tag = lstrip(t.substr(3));
  if (tag.find_first_of(" \t`") != std::string::npos) return std::nullopt;
  return tag;
}

struct Block {
  std::string tag;
  std::vector<std::string> lines;
};

std::string join_trimmed(const std::vector<std::string>& lines) {
  std::size_t b = 0, e = lines.size();
  auto blank = [](const std::string& s) { return lstrip(rstrip(s)).empty(); };
  while (b < e && blank(lines[b])) ++b;
  while (e > b && blank(lines[e - 1])) --e;
  std::string out;
  for (std::size_t i = b; i < e; ++i) {
    out += rstrip(lines[i]);
    out += '\n';
  }
  return out;
}

}  // namespace

std::string extract_block(std::string_view raw) {
  std::istringstream in{std::string(raw)};
  std::string line;
  std::vector<Block> blocks;
  std::optional<Block> open;
  while (std::getline(in, line)) {
    auto tag = fence_tag(line);
    if (!open) {
      if (tag) open = Block{*tag, {}};
      continue;
    }
    if (tag && tag->empty()) {
      blocks.push_back(std::move(*open));
      open.reset();
      continue;
    }
    open->lines.push_back(line);
  }
  if (blocks.empty()) throw DslError(ErrorCode::NoBlockFound, Span{1, 1}, "no fenced block found");
  if (blocks.size() == 1) return join_trimmed(blocks.front().lines);
  const Block* tagged = nullptr;
  std::size_t n_tagged = 0;
  for (const auto& b : blocks)
    if (b.tag == "ecdsl") {
      tagged = &b;
      ++n_tagged;
    }
  if (n_tagged == 1) return join_trimmed(tagged->lines);
  throw DslError(ErrorCode::AmbiguousBlocks, Span{1, 1},
                 std::to_string(blocks.size()) + " fenced blocks found and " +
                     (n_tagged == 0 ? std::string("none is") : std::to_string(n_tagged) + " are") +
                     " tagged ecdsl");
}

}  // namespace ec::dsl
