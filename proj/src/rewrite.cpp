#include "hardsynth/rewrite.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "json.hpp"

#include "hardsynth/errors.hpp"
#include "hardsynth/metrics.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hardsynth {

using nlohmann::json;

std::string build_prompt(const std::string& sentence) {
  if (sentence.empty()) throw EmptySentenceError("empty sentence");
  std::string prompt =
      "You are a professional text rewriter.\n"
      "Please rewrite the following sentence without changing its meaning. "
      "Please give the rewritten sentence directly.\n"
      "Sentence: ";
  prompt += sentence;  // literal substitution, no re-templating
  return prompt;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace((unsigned char)s[b])) ++b;
  while (e > b && std::isspace((unsigned char)s[e - 1])) --e;
  return s.substr(b, e - b);
}

bool strip_prefix_ci(std::string& s, const std::string& prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (std::tolower((unsigned char)s[i]) !=
        std::tolower((unsigned char)prefix[i]))
      return false;
  s = trim(s.substr(prefix.size()));
  return true;
}

std::string first_nonempty_line(const std::string& s) {
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t nl = s.find('\n', pos);
    const std::string line =
        trim(nl == std::string::npos ? s.substr(pos) : s.substr(pos, nl - pos));
    if (!line.empty()) return line;
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }
  return "";
}

}  // namespace

std::string postprocess_response(const std::string& raw,
                                 const NormPolicy& policy) {
  std::string line = first_nonempty_line(raw);
  bool changed = true;
  while (changed && !line.empty()) {
    changed = false;
    changed |= strip_prefix_ci(line, "rewritten sentence:");
    changed |= strip_prefix_ci(line, "sentence:");
    if (line.size() >= 2 &&
        ((line.front() == '"' && line.back() == '"') ||
         (line.front() == '\'' && line.back() == '\''))) {
      line = trim(line.substr(1, line.size() - 2));
      changed = true;
    }
  }
  const std::string cleaned = normalize(line, policy);
  if (cleaned.empty())
    throw EmptyAfterCleanupError("nothing left after cleanup");
  return cleaned;
}

std::vector<RewritePair> rewrite_corpus(
    const std::vector<std::pair<std::string, std::string>>& texts,
    LlmClient& llm, const NormPolicy& policy, const RewriteFilters& filters,
    int parallelism, double max_failure_frac) {
  const std::size_t n = texts.size();
  std::vector<RewritePair> pairs(n);
  std::vector<char> failed(n, 0);

  const std::int64_t count = std::int64_t(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(std::max(parallelism, 1))
#endif
  for (std::int64_t idx = 0; idx < count; ++idx) {
    const std::size_t i = std::size_t(idx);
    RewritePair pair;
    pair.id = texts[i].first;
    pair.original = texts[i].second;
    try {
      const std::string raw = llm.complete(build_prompt(pair.original));
      std::string rewritten;
      try {
        rewritten = postprocess_response(raw, policy);
      } catch (const EmptyAfterCleanupError&) {
        pair.ok = false;
        pair.reason = "empty";
        pairs[i] = std::move(pair);
        continue;
      }
      const std::string norm_original = normalize(pair.original, policy);
      if (filters.reject_identical && rewritten == norm_original) {
        pair.rewritten = rewritten;
        pair.ok = false;
        pair.reason = "identical";
      } else {
        const double ratio = norm_original.empty()
                                 ? 0.0
                                 : double(rewritten.size()) /
                                       double(norm_original.size());
        if (ratio < filters.length_ratio_min ||
            ratio > filters.length_ratio_max) {
          pair.rewritten = rewritten;
          pair.ok = false;
          pair.reason = "length_ratio";
        } else {
          pair.rewritten = rewritten;
          pair.ok = true;
        }
      }
    } catch (const EmptySentenceError&) {
      pair.ok = false;
      pair.reason = "empty";
    } catch (const std::exception& e) {
      pair.ok = false;
      pair.reason = std::string("error: ") + e.what();
      failed[i] = 1;
    }
    pairs[i] = std::move(pair);
  }

  std::size_t failures = 0;
  for (char f : failed) failures += std::size_t(f);
  if (n > 0 && double(failures) / double(n) > max_failure_frac)
    throw ExcessiveFailuresError(std::to_string(failures) + " of " +
                                 std::to_string(n) + " rewrites failed");
  return pairs;
}

std::vector<RewritePair> load_rewrite_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open rewrite manifest: " + path);
  std::vector<RewritePair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw ManifestError(path + ":" + std::to_string(line_no) +
                          ": malformed rewrite manifest line");
    RewritePair p;
    try {
      p.id = j.at("id").get<std::string>();
      p.original = j.at("original").get<std::string>();
      p.rewritten = j.value("rewritten", std::string());
      p.ok = j.at("status").get<std::string>() == "ok";
      p.reason = j.value("reason", std::string());
    } catch (const json::exception& e) {
      throw ManifestError(path + ":" + std::to_string(line_no) + ": " +
                          e.what());
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

void write_rewrite_manifest(const std::vector<RewritePair>& pairs,
                            const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (const auto& p : pairs) {
    json j;
    j["id"] = p.id;
    j["original"] = p.original;
    j["rewritten"] = p.rewritten;
    j["status"] = p.ok ? "ok" : "rejected";
    if (!p.reason.empty()) j["reason"] = p.reason;
    out << j.dump() << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace hardsynth
