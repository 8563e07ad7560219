#pragma once

#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "activeirl/active_loop.hpp"
#include "activeirl/config_io.hpp"

// After Eigen: httplib pulls in system headers whose macros clash with it.
#include <httplib.h>

namespace airl {

/// Error carrying the HTTP status it should map to.
struct ServiceError : std::runtime_error {
    int status;
    ServiceError(int code, const std::string& msg) : std::runtime_error(msg), status(code) {}
};

enum class Phase { AwaitingQuery, Demonstrating, Computing };

inline const char* phase_name(Phase p) {
    switch (p) {
        case Phase::AwaitingQuery: return "awaiting_query";
        case Phase::Demonstrating: return "demonstrating";
        case Phase::Computing: return "computing";
    }
    return "?";
}

struct ServiceOptions {
    std::string log_dir;            // empty: no persistence
    std::uint64_t seed = 0;         // used for sessions created without an explicit seed
    SamplerConfig sampler;          // posterior refresh settings
    EIGConfig eig;
    BOConfig bo;
    int histogram_bins = 20;
    int action_entropy_rollouts = 100;
};

/// Environment for a service preset name.
inline Environment make_preset_environment(const std::string& preset, std::uint64_t seed) {
    if (preset == "structured" || preset == "structured-paper") return make_structured_gridworld(seed);
    if (preset == "random" || preset == "random-paper") return make_random_gridworld(seed);
    throw ServiceError(400, "unknown preset '" + preset + "'");
}

inline json grid_descriptor(const Environment& env) {
    const auto& m = env.mdp;
    json rows = json::array();
    for (int r = 0; r < m.height; ++r) {
        std::string row;
        for (int c = 0; c < m.width; ++c) row.push_back(env.cell_codes[m.index(r, c)]);
        rows.push_back(row);
    }
    std::vector<int> terminal, jail;
    for (int s = 0; s < m.num_states; ++s) {
        if (m.is_terminal(s)) terminal.push_back(s);
        if (m.is_jail(s)) jail.push_back(s);
    }
    return json{{"width", m.width},     {"height", m.height},   {"num_states", m.num_states},
                {"cells", rows},        {"terminal", terminal}, {"jail", jail},
                {"step_cap", m.step_cap}, {"parameters", env.reward_map.param_names}};
}

/// Per-parameter mean/std, entropy and fixed-bin marginal histograms over the
/// prior support (values outside the support fall into the edge bins).
inline json posterior_summary(const PosteriorSampleSet& post, const Environment& env, std::size_t n_demos,
                              int bins) {
    json hist = json::array(), lo = json::array(), hi = json::array();
    for (int d = 0; d < post.dim(); ++d) {
        const double a = env.prior.lower(d), b = env.prior.upper(d);
        std::vector<double> h(bins, 0.0);
        for (const auto& s : post.samples) {
            int i = static_cast<int>(std::floor((s[d] - a) / (b - a) * bins));
            h[std::clamp(i, 0, bins - 1)] += 1.0 / static_cast<double>(post.size());
        }
        hist.push_back(h);
        lo.push_back(a);
        hi.push_back(b);
    }
    return json{{"n_demos", n_demos},
                {"entropy_nats", posterior_entropy_estimate(post).nats},
                {"mean", post.mean()},
                {"std", post.stddev()},
                {"parameters", env.reward_map.param_names},
                {"histograms", hist},
                {"bin_lower", lo},
                {"bin_upper", hi}};
}

struct Session {
    std::string id;
    std::string preset;
    Method method = Method::EigNmc;
    std::uint64_t seed = 0;
    Environment env;
    DemoDataset data;
    Phase phase = Phase::AwaitingQuery;
    Trajectory pending;
    int current_state = -1;
    Rng rng;
    PosteriorSampleSet posterior;
    json summary;
    std::shared_future<void> refresh;
    std::vector<json> events;
    std::mutex mu;
};

/// Session logic, independent of the transport. Every public call is
/// serialized per session; distinct sessions never block each other.
class SessionStore {
public:
    explicit SessionStore(ServiceOptions opt) : opt_(std::move(opt)) {
        if (!opt_.log_dir.empty()) {
            std::filesystem::create_directories(opt_.log_dir);
            replay_all();
        }
    }

    ~SessionStore() { wait_idle(); }

    json create(const std::string& preset, const std::string& method, std::optional<std::uint64_t> seed = {}) {
        Method m;
        try {
            m = parse_method(method);
        } catch (const ConfigError& e) {
            throw ServiceError(400, e.what());
        }
        std::uint64_t s;
        std::string id;
        {
            std::lock_guard lk(index_mu_);
            std::uint64_t n = counter_++;
            while (sessions_.count(make_id(n)) != 0) n = counter_++;
            s = seed.value_or(derive_seed(opt_.seed, n));
            id = make_id(n);
        }
        auto sess = build(id, preset, m, s);
        log(*sess, json{{"type", "created"}, {"preset", preset}, {"method", method}, {"seed", s}});
        refit_now(*sess);
        {
            std::lock_guard lk(index_mu_);
            sessions_[id] = sess;
        }
        return json{{"id", id}, {"grid", grid_descriptor(sess->env)}};
    }

    json next_query(const std::string& id) {
        auto sess = get(id);
        std::unique_lock lk(sess->mu);
        while (sess->phase == Phase::Computing) {
            auto fut = sess->refresh;
            lk.unlock();
            if (fut.valid()) fut.wait();
            lk.lock();
        }
        if (sess->phase != Phase::AwaitingQuery) throw ServiceError(409, "a demonstration is already pending");
        const auto res = acquire_for(*sess);
        begin_demo(*sess, res.chosen);
        log(*sess, json{{"type", "query"}, {"xi", res.chosen}});
        json scores = json::array();
        const auto map = detail::score_map(res, sess->env.mdp.num_states);
        for (double v : map) scores.push_back(std::isnan(v) ? json(nullptr) : json(v));
        return json{{"xi", res.chosen}, {"scores", scores}};
    }

    json submit_action(const std::string& id, const json& body) {
        auto sess = get(id);
        if (!body.is_object() || !body.contains("a") || !body.at("a").is_number_integer())
            throw ServiceError(400, "body must be {\"a\": <action 0..4>}");
        const long a = body.at("a").get<long>();
        if (a < 0 || a >= sess->env.mdp.num_actions) throw ServiceError(400, "action out of range");
        std::unique_lock lk(sess->mu);
        if (sess->phase != Phase::Demonstrating) throw ServiceError(409, "no demonstration in progress");
        log(*sess, json{{"type", "action"}, {"a", a}});
        const bool done = apply_action(*sess, static_cast<int>(a));
        json out{{"state", sess->current_state},
                 {"terminated", sess->pending.terminated},
                 {"remaining", sess->env.mdp.step_cap - static_cast<int>(sess->pending.size())}};
        if (done) finalize(*sess, true);
        out["phase"] = phase_name(sess->phase);
        return out;
    }

    json posterior(const std::string& id) {
        auto sess = get(id);
        std::lock_guard lk(sess->mu);
        json out = sess->summary;
        out["computing"] = sess->phase == Phase::Computing;
        return out;
    }

    json view(const std::string& id) {
        auto sess = get(id);
        std::lock_guard lk(sess->mu);
        json demos = json::array();
        for (const auto& t : sess->data.trajectories) demos.push_back(trajectory_json(t));
        json out{{"id", sess->id},
                 {"preset", sess->preset},
                 {"method", method_name(sess->method)},
                 {"seed", sess->seed},
                 {"phase", phase_name(sess->phase)},
                 {"grid", grid_descriptor(sess->env)},
                 {"demonstrations", demos},
                 {"posterior", sess->summary}};
        out["posterior"]["computing"] = sess->phase == Phase::Computing;
        if (sess->phase == Phase::Demonstrating)
            out["pending"] = json{{"xi", sess->pending.xi},
                                  {"state", sess->current_state},
                                  {"steps", trajectory_json(sess->pending)["steps"]},
                                  {"remaining", sess->env.mdp.step_cap - static_cast<int>(sess->pending.size())}};
        return out;
    }

    /// Blocks until every background refresh has finished.
    void wait_idle() {
        std::vector<std::shared_ptr<Session>> all;
        {
            std::lock_guard lk(index_mu_);
            for (auto& [k, v] : sessions_) all.push_back(v);
        }
        for (auto& s : all) {
            std::shared_future<void> f;
            {
                std::lock_guard lk(s->mu);
                f = s->refresh;
            }
            if (f.valid()) f.wait();
        }
    }

    std::vector<std::string> ids() const {
        std::lock_guard lk(index_mu_);
        std::vector<std::string> out;
        for (const auto& [k, v] : sessions_) out.push_back(k);
        return out;
    }

    /// Snapshot of a session's dataset (for tests and replay checks).
    DemoDataset dataset(const std::string& id) {
        auto sess = get(id);
        std::lock_guard lk(sess->mu);
        return sess->data;
    }

private:
    static json trajectory_json(const Trajectory& t) {
        json steps = json::array();
        for (const auto& st : t.steps) steps.push_back(json::array({st.state, st.action}));
        return json{{"xi", t.xi}, {"steps", steps}, {"terminated", t.terminated}};
    }

    std::string make_id(std::uint64_t n) const {
        char buf[24];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(derive_seed(opt_.seed ^ 0x51d, n)));
        return buf;
    }

    std::shared_ptr<Session> build(const std::string& id, const std::string& preset, Method m, std::uint64_t seed) {
        auto sess = std::make_shared<Session>();
        sess->id = id;
        sess->preset = preset;
        sess->method = m;
        sess->seed = seed;
        sess->env = make_preset_environment(preset, seed);
        sess->rng = make_rng(seed, 0xac7);
        return sess;
    }

    std::shared_ptr<Session> get(const std::string& id) {
        std::lock_guard lk(index_mu_);
        auto it = sessions_.find(id);
        if (it == sessions_.end()) throw ServiceError(404, "unknown session '" + id + "'");
        return it->second;
    }

    SamplerConfig sampler_cfg() const {
        SamplerConfig s = opt_.sampler;
        s.beta = 1.0;
        return s;
    }

    void refit_now(Session& s) {
        s.posterior = sample_posterior(s.data, s.env, sampler_cfg(), derive_seed(s.seed, 1000 + s.data.size()));
        s.summary = posterior_summary(s.posterior, s.env, s.data.size(), opt_.histogram_bins);
    }

    AcquisitionResult acquire_for(Session& s) {
        ExperimentConfig cfg;
        cfg.method = s.method;
        cfg.eig = opt_.eig;
        cfg.bo = opt_.bo;
        cfg.action_entropy_rollouts = opt_.action_entropy_rollouts;
        const auto cands = default_candidates(s.env.mdp, true);
        const Method m = s.method == Method::SingleEigX8 ? Method::SingleEig : s.method;
        return acquire(m, cands, s.posterior.thinned_set(), s.env, cfg, derive_seed(s.seed, 2000 + s.data.size()));
    }

    static void begin_demo(Session& s, int xi) {
        s.pending = Trajectory{};
        s.pending.xi = xi;
        s.current_state = xi;
        s.phase = Phase::Demonstrating;
    }

    // Returns true when the trajectory is complete.
    static bool apply_action(Session& s, int a) {
        s.pending.steps.push_back({s.current_state, a});
        s.current_state = s.env.mdp.step(s.current_state, a, s.rng);
        if (s.env.mdp.is_terminal(s.current_state)) s.pending.terminated = true;
        return s.pending.terminated || static_cast<int>(s.pending.size()) >= s.env.mdp.step_cap;
    }

    // Caller holds s.mu.
    void finalize(Session& s, bool background) {
        s.data.add(s.pending);
        log(s, json{{"type", "finalized"}, {"n_demos", s.data.size()}});
        s.phase = Phase::Computing;
        if (!background) {
            refit_now(s);
            s.phase = Phase::AwaitingQuery;
            return;
        }
        const DemoDataset data = s.data;
        Session* sp = &s;
        auto keep = get(s.id);
        s.refresh = std::async(std::launch::async, [this, sp, keep, data] {
                        auto post = sample_posterior(data, sp->env, sampler_cfg(),
                                                     derive_seed(sp->seed, 1000 + data.size()));
                        auto summary = posterior_summary(post, sp->env, data.size(), opt_.histogram_bins);
                        std::lock_guard lk(sp->mu);
                        sp->posterior = std::move(post);
                        sp->summary = std::move(summary);
                        sp->phase = Phase::AwaitingQuery;
                    }).share();
    }

    std::string log_path(const std::string& id) const { return (std::filesystem::path(opt_.log_dir) / (id + ".jsonl")).string(); }

    void log(Session& s, const json& ev) {
        s.events.push_back(ev);
        if (opt_.log_dir.empty()) return;
        std::ofstream out(log_path(s.id), std::ios::app);
        out << ev.dump() << '\n';
        out.flush();
    }

    // Rebuilds sessions from their event logs. Posteriors are recomputed
    // synchronously from the replayed datasets.
    void replay_all() {
        std::vector<std::filesystem::path> files;
        for (const auto& e : std::filesystem::directory_iterator(opt_.log_dir))
            if (e.path().extension() == ".jsonl") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            try {
                replay_file(f);
            } catch (const std::exception& e) {
                spdlog::warn("demo service: skipping session log {}: {}", f.string(), e.what());
            }
        }
    }

    void replay_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        std::string line;
        std::shared_ptr<Session> sess;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const json ev = json::parse(line);
            const auto type = ev.at("type").get<std::string>();
            if (type == "created") {
                sess = build(path.stem().string(), ev.at("preset").get<std::string>(),
                             parse_method(ev.at("method").get<std::string>()), ev.at("seed").get<std::uint64_t>());
            } else if (!sess) {
                throw ConfigError("log does not start with a created event");
            } else if (type == "query") {
                begin_demo(*sess, ev.at("xi").get<int>());
            } else if (type == "action") {
                apply_action(*sess, ev.at("a").get<int>());
            } else if (type == "finalized") {
                sess->data.add(sess->pending);
                sess->phase = Phase::AwaitingQuery;
            }
            sess->events.push_back(ev);
        }
        if (!sess) return;
        // A trajectory completed by the last action but whose finalized event
        // was lost is finalized now.
        if (sess->phase == Phase::Demonstrating &&
            (sess->pending.terminated || static_cast<int>(sess->pending.size()) >= sess->env.mdp.step_cap)) {
            sess->data.add(sess->pending);
            sess->phase = Phase::AwaitingQuery;
        }
        refit_now(*sess);
        std::lock_guard lk(index_mu_);
        sessions_[sess->id] = sess;
        ++counter_;
    }

    ServiceOptions opt_;
    mutable std::mutex index_mu_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t counter_ = 0;
};

/// HTTP front end for SessionStore.
class DemoServer {
public:
    explicit DemoServer(ServiceOptions opt) : store_(std::move(opt)) { routes(); }

    SessionStore& store() { return store_; }

    /// Binds to host:port (port 0 picks a free port) and serves on a
    /// background thread. Returns the bound port.
    int start(const std::string& host = "127.0.0.1", int port = 0) {
        port_ = port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
        if (port_ < 0) throw ConfigError("cannot bind " + host + ":" + std::to_string(port));
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
        return port_;
    }

    /// Serves on the calling thread until stop().
    void run(const std::string& host, int port) {
        if (!server_.listen(host, port)) throw ConfigError("cannot listen on " + host + ":" + std::to_string(port));
    }

    void stop() {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    ~DemoServer() { stop(); }

private:
    template <class Fn>
    static void guarded(httplib::Response& res, Fn&& fn) {
        try {
            const json out = fn();
            res.status = 200;
            res.set_content(out.dump(), "application/json");
        } catch (const ServiceError& e) {
            res.status = e.status;
            res.set_content(json{{"error", e.what()}}.dump(), "application/json");
        } catch (const json::exception& e) {
            res.status = 400;
            res.set_content(json{{"error", std::string("bad request body: ") + e.what()}}.dump(), "application/json");
        } catch (const InputError& e) {
            res.status = 400;
            res.set_content(json{{"error", e.what()}}.dump(), "application/json");
        } catch (const std::exception& e) {
            res.status = 500;
            res.set_content(json{{"error", e.what()}}.dump(), "application/json");
        }
    }

    static json parse_body(const httplib::Request& req) {
        if (req.body.empty()) return json::object();
        try {
            return json::parse(req.body);
        } catch (const json::parse_error&) {
            throw ServiceError(400, "request body is not valid JSON");
        }
    }

    void routes() {
        server_.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const json body = parse_body(req);
                if (!body.is_object() || !body.contains("preset") || !body.at("preset").is_string())
                    throw ServiceError(400, "body must contain a string 'preset'");
                const std::string method = body.value("method", std::string("eig_nmc"));
                std::optional<std::uint64_t> seed;
                if (body.contains("seed")) seed = body.at("seed").get<std::uint64_t>();
                return store_.create(body.at("preset").get<std::string>(), method, seed);
            });
        });
        server_.Post(R"(/sessions/([^/]+)/query)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { return store_.next_query(req.matches[1]); });
        });
        server_.Post(R"(/sessions/([^/]+)/action)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { return store_.submit_action(req.matches[1], parse_body(req)); });
        });
        server_.Get(R"(/sessions/([^/]+)/posterior)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { return store_.posterior(req.matches[1]); });
        });
        server_.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { return store_.view(req.matches[1]); });
        });
    }

    SessionStore store_;
    httplib::Server server_;
    std::thread thread_;
    int port_ = -1;
};

}  // namespace airl
