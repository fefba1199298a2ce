#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "trawl/types.hpp"

namespace trawl {

/// Generator for a two-topic stand-in corpus.
///
/// Each document mixes three sources: a genre-neutral background vocabulary,
/// the topic vocabulary of its class, and OCR-style noise tokens. The two
/// topic vocabularies share `shared_fraction` of their words. A topic is
/// further split into `subtopics` slices; every document leans towards one
/// slice, so tiny training samples cover the topic unevenly.
struct SynthConfig {
  std::uint64_t seed = 7;
  std::vector<Century> centuries{Century::C17};
  std::uint32_t docs_per_class = 200;
  std::uint32_t tokens_per_doc = 2000;
  double length_jitter = 0.25;  // document length uniform in tokens * (1 +/- jitter)
  std::uint32_t topic_vocab = 2000;
  double shared_fraction = 0.2;
  std::uint32_t background_vocab = 4000;
  double background_rate = 0.7;
  std::uint32_t subtopics = 8;
  double subtopic_rate = 0.8;  // share of topical tokens drawn from the doc's slice
  double noise_rate = 0.05;
  double zipf_exponent = 1.0;
  std::uint32_t candidates = 1000;
  std::uint32_t planted = 100;  // positives hidden among the candidates

  void validate() const;
};

struct SynthVocabulary {
  std::vector<std::string> background;
  std::vector<std::string> topic[2];  // [0] non-travelogue, [1] travelogue
  std::size_t shared = 0;             // the first `shared` words of both topics coincide
};

SynthVocabulary build_vocabulary(const SynthConfig& cfg);

/// Text of one document of class `label`; `seed` fixes its content.
std::string synth_document(const SynthVocabulary& vocab, const SynthConfig& cfg, Label label,
                           std::uint64_t seed);

struct SynthResult {
  std::filesystem::path manifest;  // labeled ground truth plus unlabeled candidates
  std::filesystem::path truth;     // candidates_truth.csv
  std::size_t documents = 0;
};

/// Writes texts/, manifest.jsonl and candidates_truth.csv under `out_dir`.
SynthResult generate_corpus(const SynthConfig& cfg, const std::filesystem::path& out_dir, unsigned jobs = 1);

/// Reads candidates_truth.csv (`doc_id,label`).
std::vector<std::pair<std::string, Label>> load_candidate_truth(const std::filesystem::path& path);

}  // namespace trawl
