#include <fstream>

#include "httplib.h"
#include "json.hpp"
#include "trawl/annotate.hpp"

namespace trawl {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::size_t kTextChunk = 64 * 1024;
constexpr std::size_t kDefaultLimit = 50;
constexpr std::size_t kMaxLimit = 1000;

ordered_json record_json(const AnnotationRecord& r) {
  return {{"doc_id", r.doc_id},
          {"verdict", std::string(to_string(r.verdict))},
          {"annotator", r.annotator},
          {"timestamp", format_utc(r.timestamp)},
          {"round", r.round}};
}

void send_json(httplib::Response& res, int status, const ordered_json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, ErrorCode code, const std::string& message) {
  send_json(res, http_status(code), {{"error_code", std::string(to_string(code))}, {"message", message}});
}

std::size_t size_param(const httplib::Request& req, const char* name, std::size_t fallback) {
  if (!req.has_param(name)) return fallback;
  const std::string v = req.get_param_value(name);
  std::size_t pos = 0;
  unsigned long long n = 0;
  try {
    n = std::stoull(v, &pos);
  } catch (const std::exception&) {
    pos = std::string::npos;
  }
  if (pos != v.size() || v.empty() || v[0] == '-')
    fail(ErrorCode::InvalidArgument, std::string("query parameter '") + name + "' must be a non-negative integer");
  return static_cast<std::size_t>(n);
}

Century century_param(const httplib::Request& req) {
  if (!req.has_param("century")) fail(ErrorCode::InvalidArgument, "query parameter 'century' is required");
  const std::string v = req.get_param_value("century");
  char* end = nullptr;
  const long n = std::strtol(v.c_str(), &end, 10);
  const auto c = (!v.empty() && *end == '\0') ? century_from_number(n) : std::nullopt;
  if (!c) fail(ErrorCode::InvalidArgument, "unknown century '" + v + "'");
  return *c;
}

/// Runs a handler and maps library errors to JSON error bodies.
template <typename F>
httplib::Server::Handler guarded(F&& fn) {
  return [fn = std::forward<F>(fn)](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_error(res, e.code(), e.what());
    } catch (const std::exception& e) {
      send_json(res, 500, {{"error_code", "Internal"}, {"message", e.what()}});
    }
  };
}

}  // namespace

struct AnnotationServer::Impl {
  AnnotationService& service;
  httplib::Server server;

  explicit Impl(AnnotationService& s) : service(s) {}
};

AnnotationServer::AnnotationServer(AnnotationService& service, std::filesystem::path ui_dir)
    : impl_(std::make_unique<Impl>(service)) {
  auto& srv = impl_->server;
  AnnotationService* svc = &service;

  srv.Get("/api/queue", guarded([svc](const httplib::Request& req, httplib::Response& res) {
            const Century c = century_param(req);
            const std::size_t offset = size_param(req, "offset", 0);
            const std::size_t limit = std::min(size_param(req, "limit", kDefaultLimit), kMaxLimit);
            const QueuePage page = svc->get_queue(c, offset, limit);
            ordered_json items = ordered_json::array();
            for (const auto& it : page.items) {
              ordered_json j;
              j["rank"] = it.candidate.rank;
              j["doc_id"] = it.candidate.doc_id;
              j["score"] = it.candidate.score;
              j["century"] = century_number(it.candidate.century);
              j["model_fingerprint"] = it.candidate.model_fingerprint;
              j["text_excerpt"] = it.text_excerpt;
              j["full_text_available"] = it.full_text_available;
              j["current_verdict"] =
                  it.current_verdict ? ordered_json(std::string(to_string(*it.current_verdict))) : ordered_json(nullptr);
              j["disputed"] = it.disputed;
              j["verdicts"] = ordered_json::array();
              for (const auto& r : it.verdicts) j["verdicts"].push_back(record_json(r));
              items.push_back(std::move(j));
            }
            send_json(res, 200,
                      {{"century", century_number(page.century)},
                       {"offset", page.offset},
                       {"limit", limit},
                       {"total", page.total},
                       {"items", std::move(items)}});
          }));

  srv.Get(R"(/api/doc/([^/]+)/text)", guarded([svc](const httplib::Request& req, httplib::Response& res) {
            const auto path = svc->text_path(req.matches[1].str());
            auto file = std::make_shared<std::ifstream>(path, std::ios::binary);
            if (!*file) fail(ErrorCode::UnreadableText, "cannot read text of '" + req.matches[1].str() + "'");
            const auto size = static_cast<std::size_t>(std::filesystem::file_size(path));
            res.set_content_provider(
                size, "text/plain; charset=utf-8",
                [file](std::size_t offset, std::size_t length, httplib::DataSink& sink) {
                  std::vector<char> buf(std::min(length, kTextChunk));
                  file->seekg(static_cast<std::streamoff>(offset));
                  file->read(buf.data(), static_cast<std::streamsize>(buf.size()));
                  const auto got = static_cast<std::size_t>(file->gcount());
                  if (got == 0) return false;
                  return sink.write(buf.data(), got);
                });
          }));

  srv.Post("/api/verdict", guarded([svc](const httplib::Request& req, httplib::Response& res) {
             const json body = json::parse(req.body, nullptr, false);
             if (!body.is_object()) fail(ErrorCode::InvalidArgument, "body must be a JSON object");
             auto str = [&](const char* key) {
               if (!body.contains(key) || !body[key].is_string())
                 fail(ErrorCode::MissingField, std::string("field '") + key + "' must be a string");
               return body[key].get<std::string>();
             };
             const std::string doc_id = str("doc_id");
             const std::string annotator = str("annotator");
             const auto verdict = verdict_from_string(str("verdict"));
             if (!verdict) fail(ErrorCode::InvalidField, "verdict must be confirm, reject or uncertain");
             const PostResult r = svc->post_verdict(doc_id, *verdict, annotator);
             switch (r.status) {
               case PostResult::Status::Created:
                 send_json(res, 201, {{"status", "created"}, {"record", record_json(r.record)}});
                 break;
               case PostResult::Status::Duplicate:
                 send_json(res, 200, {{"status", "duplicate"}, {"record", record_json(r.record)}});
                 break;
               case PostResult::Status::Conflict:
                 send_json(res, 409,
                           {{"error_code", std::string(to_string(ErrorCode::ConflictingVerdicts))},
                            {"message", "annotator already gave a different verdict in this round"},
                            {"existing", record_json(r.record)}});
                 break;
             }
           }));

  srv.Get("/api/progress", guarded([svc](const httplib::Request& req, httplib::Response& res) {
            const Progress p = svc->get_progress(century_param(req));
            send_json(res, 200,
                      {{"century", century_number(p.century)},
                       {"queue_size", p.queue_size},
                       {"evaluated", p.evaluated},
                       {"confirmed", p.confirmed},
                       {"rejected", p.rejected},
                       {"disputed", p.disputed},
                       {"uncertain", p.uncertain},
                       {"remaining", p.remaining},
                       {"confirmation_rate", p.confirmation_rate},
                       {"rate_defined", p.rate_defined}});
          }));

  srv.Get("/api/export", guarded([svc](const httplib::Request& req, httplib::Response& res) {
            const auto round = static_cast<std::int64_t>(size_param(req, "round", static_cast<std::size_t>(svc->round())));
            const GroundTruthExport e = svc->export_ground_truth(round);
            std::string ids;
            for (const auto& id : e.disagreements) ids += (ids.empty() ? "" : ",") + id;
            res.set_header("X-Disagreements", ids);
            res.status = 200;
            res.set_content(e.manifest, "application/x-ndjson");
          }));

  if (!ui_dir.empty() && std::filesystem::is_directory(ui_dir)) srv.set_mount_point("/", ui_dir.string());
}

AnnotationServer::~AnnotationServer() { stop(); }

int AnnotationServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool AnnotationServer::listen() { return impl_->server.listen_after_bind(); }

void AnnotationServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void AnnotationServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace trawl
