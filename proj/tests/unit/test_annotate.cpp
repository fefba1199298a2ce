#include <gtest/gtest.h>

#include <thread>

#include "testing.hpp"
#include "trawl/annotate.hpp"
#include "trawl/error.hpp"

using namespace trawl;
using trawl::testkit::error_code;
using trawl::testkit::TempDir;
using trawl::testkit::write_file;

namespace {

/// Queue of `n` documents for C17 with texts on disk.
struct QueueFixture {
  TempDir dir{"annotate"};
  ServiceOptions opts;
  int tick = 0;

  explicit QueueFixture(std::size_t n = 5) {
    Ranking r;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string id = "d" + std::to_string(i);
      write_file(dir / ("t/" + id + ".txt"), "Reise " + id + " \xc3\xbc" "ber Berge");
      r.ranked.push_back({id, 1.0 - 0.1 * static_cast<double>(i), 0, "fp", Century::C17});
      opts.documents.push_back({id, Century::C17, dir / ("t/" + id + ".txt"), std::nullopt});
    }
    assign_ranks(r.ranked);
    r.skipped.push_back({"broken", Century::C17, "InvalidUtf8"});
    export_queue(r, dir / "queue_17.csv");
    opts.queues[Century::C17] = dir / "queue_17.csv";
    opts.annotation_log = dir / "annotations.jsonl";
    opts.clock = [this] { return std::chrono::sys_seconds{std::chrono::seconds{1700000000 + tick++}}; };
  }
};

}  // namespace

TEST(AnnotationService, QueuePagesCarryExcerpts) {
  QueueFixture fx;
  fx.opts.excerpt_chars = 7;
  AnnotationService svc(fx.opts);
  const auto page = svc.get_queue(Century::C17, 1, 2);
  EXPECT_EQ(page.total, 5u);
  ASSERT_EQ(page.items.size(), 2u);
  EXPECT_EQ(page.items[0].candidate.doc_id, "d1");
  EXPECT_EQ(page.items[0].candidate.rank, 2u);
  EXPECT_EQ(page.items[0].text_excerpt, "Reise d");
  EXPECT_TRUE(page.items[0].full_text_available);
  EXPECT_FALSE(page.items[0].current_verdict);
  EXPECT_TRUE(svc.get_queue(Century::C17, 10, 5).items.empty());
  EXPECT_EQ(error_code([&] { svc.get_queue(Century::C16, 0, 5); }), ErrorCode::NoQueueForCentury);
}

TEST(AnnotationService, SkippedRowsAreNotReviewable) {
  QueueFixture fx;
  AnnotationService svc(fx.opts);
  EXPECT_EQ(error_code([&] { svc.post_verdict("broken", Verdict::Confirm, "a"); }), ErrorCode::UnknownDocId);
}

TEST(AnnotationService, PostVerdictStatuses) {
  QueueFixture fx;
  AnnotationService svc(fx.opts);
  const auto r1 = svc.post_verdict("d0", Verdict::Confirm, "anna");
  EXPECT_EQ(r1.status, PostResult::Status::Created);
  EXPECT_EQ(r1.record.round, 0);
  EXPECT_EQ(svc.post_verdict("d0", Verdict::Confirm, "anna").status, PostResult::Status::Duplicate);
  const auto c = svc.post_verdict("d0", Verdict::Reject, "anna");
  EXPECT_EQ(c.status, PostResult::Status::Conflict);
  EXPECT_EQ(c.record.verdict, Verdict::Confirm);
  EXPECT_EQ(svc.post_verdict("d0", Verdict::Reject, "ben").status, PostResult::Status::Created);
  EXPECT_EQ(svc.records().size(), 2u);
  EXPECT_EQ(error_code([&] { svc.post_verdict("zz", Verdict::Confirm, "a"); }), ErrorCode::UnknownDocId);
  EXPECT_EQ(error_code([&] { svc.post_verdict("d1", Verdict::Confirm, ""); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(load_annotation_log(fx.opts.annotation_log), svc.records());
}

TEST(AnnotationService, ProgressCounts) {
  QueueFixture fx;
  AnnotationService svc(fx.opts);
  EXPECT_FALSE(svc.get_progress(Century::C17).rate_defined);
  svc.post_verdict("d0", Verdict::Confirm, "a");
  svc.post_verdict("d1", Verdict::Reject, "a");
  svc.post_verdict("d2", Verdict::Uncertain, "a");
  svc.post_verdict("d3", Verdict::Confirm, "a");
  svc.post_verdict("d3", Verdict::Reject, "b");
  const auto p = svc.get_progress(Century::C17);
  EXPECT_EQ(p.queue_size, 5u);
  EXPECT_EQ(p.confirmed, 1u);
  EXPECT_EQ(p.rejected, 1u);
  EXPECT_EQ(p.evaluated, 2u);
  EXPECT_EQ(p.disputed, 1u);
  EXPECT_EQ(p.uncertain, 1u);
  EXPECT_EQ(p.remaining, 3u);
  EXPECT_EQ(p.confirmation_rate, 0.5);

  const auto page = svc.get_queue(Century::C17, 0, 5);
  EXPECT_EQ(page.items[0].current_verdict, Verdict::Confirm);
  EXPECT_TRUE(page.items[3].disputed);
  EXPECT_FALSE(page.items[3].current_verdict);
  EXPECT_EQ(page.items[3].verdicts.size(), 2u);
}

TEST(AnnotationService, LaterRoundOverridesEarlier) {
  QueueFixture fx;
  {
    AnnotationService svc(fx.opts);
    svc.post_verdict("d0", Verdict::Reject, "a");
  }
  fx.opts.round = 1;
  AnnotationService svc(fx.opts);
  EXPECT_EQ(svc.post_verdict("d0", Verdict::Confirm, "a").status, PostResult::Status::Created);
  EXPECT_EQ(svc.get_progress(Century::C17).confirmed, 1u);
  EXPECT_EQ(svc.get_progress(Century::C17).rejected, 0u);
}

TEST(AnnotationService, RestartReplaysLog) {
  QueueFixture fx;
  Progress before;
  {
    AnnotationService svc(fx.opts);
    svc.post_verdict("d0", Verdict::Confirm, "a");
    svc.post_verdict("d1", Verdict::Reject, "a");
    before = svc.get_progress(Century::C17);
  }
  AnnotationService svc(fx.opts);
  EXPECT_EQ(svc.get_progress(Century::C17), before);
  EXPECT_EQ(svc.post_verdict("d0", Verdict::Confirm, "a").status, PostResult::Status::Duplicate);
}

TEST(AnnotationService, TornTailIsDropped) {
  QueueFixture fx;
  {
    AnnotationService svc(fx.opts);
    svc.post_verdict("d0", Verdict::Confirm, "a");
  }
  {
    std::ofstream f(fx.opts.annotation_log, std::ios::app | std::ios::binary);
    f << R"({"doc_id":"d1","verdict":"rej)";
  }
  AnnotationService svc(fx.opts);
  EXPECT_EQ(svc.records().size(), 1u);
  svc.post_verdict("d2", Verdict::Reject, "a");
  const auto log = load_annotation_log(fx.opts.annotation_log);
  ASSERT_EQ(log.size(), 2u);
  EXPECT_EQ(log[1].doc_id, "d2");
}

TEST(AnnotationService, ConcurrentPostsAllLand) {
  QueueFixture fx(40);
  AnnotationService svc(fx.opts);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t)
    threads.emplace_back([&, t] {
      for (int i = 0; i < 40; ++i) {
        svc.post_verdict("d" + std::to_string(i), i % 2 ? Verdict::Confirm : Verdict::Reject, "ann" + std::to_string(t));
        svc.get_progress(Century::C17);
      }
    });
  for (auto& th : threads) th.join();
  EXPECT_EQ(svc.records().size(), 160u);
  EXPECT_EQ(load_annotation_log(fx.opts.annotation_log).size(), 160u);
  const auto p = svc.get_progress(Century::C17);
  EXPECT_EQ(p.confirmed, 20u);
  EXPECT_EQ(p.rejected, 20u);
}

TEST(AnnotationService, ExportGroundTruth) {
  QueueFixture fx;
  AnnotationService svc(fx.opts);
  svc.post_verdict("d2", Verdict::Confirm, "a");
  svc.post_verdict("d0", Verdict::Reject, "a");
  svc.post_verdict("d1", Verdict::Uncertain, "a");
  svc.post_verdict("d3", Verdict::Confirm, "a");
  svc.post_verdict("d3", Verdict::Reject, "b");
  const auto ex = svc.export_ground_truth(0);
  EXPECT_EQ(ex.disagreements, std::vector<std::string>{"d3"});
  const auto refs = parse_manifest(ex.manifest, "/", true);
  ASSERT_EQ(refs.size(), 2u);
  EXPECT_EQ(refs[0].id, "d0");
  EXPECT_EQ(refs[0].label, Label::NonTravelogue);
  EXPECT_EQ(refs[1].label, Label::Travelogue);
  EXPECT_EQ(refs[1].provenance, Provenance::ModelDiscovery);
  EXPECT_TRUE(refs[1].text_path.is_absolute());
  EXPECT_TRUE(svc.export_ground_truth(1).manifest.empty());
}

TEST(ReadExcerpt, CutsAtCodePointBoundary) {
  TempDir dir;
  write_file(dir / "t.txt", "a\xc3\xbc\xc3\x9f" "b");
  EXPECT_EQ(read_excerpt(dir / "t.txt", 2), "a\xc3\xbc");
  EXPECT_EQ(read_excerpt(dir / "t.txt", 100), "a\xc3\xbc\xc3\x9f" "b");
  write_file(dir / "bad.txt", "ab\xff" "cd");
  EXPECT_EQ(read_excerpt(dir / "bad.txt", 10), "ab");
}

TEST(HttpStatus, Mapping) {
  EXPECT_EQ(http_status(ErrorCode::UnknownDocId), 404);
  EXPECT_EQ(http_status(ErrorCode::NoQueueForCentury), 404);
  EXPECT_EQ(http_status(ErrorCode::ConflictingVerdicts), 409);
  EXPECT_EQ(http_status(ErrorCode::InvalidArgument), 400);
  EXPECT_EQ(http_status(ErrorCode::Io), 500);
}
