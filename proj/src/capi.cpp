#include "gbq/gbq.h"

#include <cstring>
#include <new>
#include <string>

#include "commands.hpp"

struct gbq_config {
  gbq::RunConfig cfg;
};

struct gbq_sweep {
  gbq::SweepConfig cfg;
};

struct gbq_ground_state {
  gbq::GroundState gs;
};

struct gbq_report {
  gbq::CommandResult result;
};

namespace {

thread_local std::string g_last_error;

template <class F>
gbq_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return GBQ_OK;
  } catch (const gbq::NotConverged& e) {
    g_last_error = std::string(e.what()) + " (iterations " + std::to_string(e.iterations()) +
                   ", last change " + gbq::format_double(e.last_change()) + ")";
    return GBQ_ERR_NOT_CONVERGED;
  } catch (const gbq::Error& e) {
    g_last_error = e.what();
    return static_cast<gbq_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return GBQ_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return GBQ_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) gbq::fail(gbq::ErrorCode::invalid_argument, std::string(what) + " must not be NULL");
}

std::string opt_path(const char* p) { return p ? std::string(p) : std::string(); }

gbq::GroundStateArgs to_args(const gbq_ground_state_options& o) {
  gbq::GroundStateArgs a;
  a.alpha = o.alpha;
  a.dim = o.dim;
  a.box = o.box > 0.0 ? o.box : 0.0;
  a.points = o.points > 0 ? o.points : 0;
  a.tol = o.tol;
  a.max_iter = o.max_iter;
  return a;
}

gbq_status emit(gbq::CommandResult r, gbq_report** out) {
  *out = new gbq_report{std::move(r)};
  return GBQ_OK;
}

}  // namespace

extern "C" {

const char* gbq_version(void) { return "1.0.0"; }

const char* gbq_last_error(void) { return g_last_error.c_str(); }

const char* gbq_status_name(gbq_status s) {
  switch (s) {
    case GBQ_OK: return "ok";
    case GBQ_ERR_INVALID_ARGUMENT: return "invalid argument";
    case GBQ_ERR_GRID_MISMATCH: return "grid mismatch";
    case GBQ_ERR_ILL_DEFINED: return "ill-defined quantity";
    case GBQ_ERR_NOT_CONVERGED: return "not converged";
    case GBQ_ERR_BLOWUP_SUSPECTED: return "blowup suspected";
    case GBQ_ERR_IO: return "i/o error";
    case GBQ_ERR_OUT_OF_RANGE: return "out of range";
    case GBQ_ERR_PARSE: return "parse error";
    case GBQ_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void gbq_string_free(char* s) { delete[] s; }

gbq_status gbq_config_load(const char* path, gbq_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new gbq_config{gbq::load_run_config(path)};
  });
}

gbq_status gbq_config_parse(const char* text, gbq_config** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    *out = new gbq_config{gbq::parse_run_config(text)};
  });
}

gbq_status gbq_config_set(gbq_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    need(cfg, "cfg");
    need(key, "key");
    need(value, "value");
    gbq::RunConfig next = cfg->cfg;
    gbq::set_config_value(next, key, value);
    next.validate();
    cfg->cfg = std::move(next);
  });
}

gbq_status gbq_config_serialize(const gbq_config* cfg, char** text) {
  return guarded([&] {
    need(cfg, "cfg");
    need(text, "text");
    const std::string s = gbq::serialize(cfg->cfg);
    char* buf = new char[s.size() + 1];
    std::memcpy(buf, s.c_str(), s.size() + 1);
    *text = buf;
  });
}

void gbq_config_free(gbq_config* cfg) { delete cfg; }

gbq_status gbq_sweep_load(const char* path, gbq_sweep** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new gbq_sweep{gbq::load_sweep_config(path)};
  });
}

gbq_status gbq_sweep_parse(const char* text, gbq_sweep** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    *out = new gbq_sweep{gbq::parse_sweep_config(text)};
  });
}

void gbq_sweep_set_seed(gbq_sweep* sweep, unsigned long long seed) {
  if (sweep) sweep->cfg.spec.init.seed = seed;
}

void gbq_sweep_free(gbq_sweep* sweep) { delete sweep; }

void gbq_ground_state_options_default(gbq_ground_state_options* opts) {
  if (!opts) return;
  *opts = gbq_ground_state_options{3.0, 1, 0.0, 0, 1e-12, 5000};
}

gbq_status gbq_ground_state_compute(const gbq_ground_state_options* opts, gbq_ground_state** out) {
  return guarded([&] {
    need(opts, "opts");
    need(out, "out");
    const gbq::GroundStateArgs a = to_args(*opts);
    gbq::require(a.dim >= 1 && a.dim <= 3, "dim must be 1, 2 or 3");
    const int n = a.points > 0 ? a.points : (a.dim == 1 ? 2048 : a.dim == 2 ? 256 : 128);
    const double L = a.box > 0.0 ? a.box : gbq::default_ground_state_box(a.dim);
    gbq::PetviashviliOptions po;
    po.tol = a.tol;
    po.max_iter = a.max_iter;
    *out = new gbq_ground_state{gbq::petviashvili(gbq::make_cubic_grid(a.dim, n, L), a.alpha, po)};
  });
}

gbq_status gbq_ground_state_load(const char* checkpoint_path, gbq_ground_state** out) {
  return guarded([&] {
    need(checkpoint_path, "checkpoint_path");
    need(out, "out");
    *out = new gbq_ground_state{gbq::read_ground_state(checkpoint_path)};
  });
}

gbq_status gbq_ground_state_save(const gbq_ground_state* gs, const char* checkpoint_path, const char* sidecar_path) {
  return guarded([&] {
    need(gs, "gs");
    need(checkpoint_path, "checkpoint_path");
    need(sidecar_path, "sidecar_path");
    gbq::write_ground_state(gs->gs, checkpoint_path, sidecar_path);
  });
}

gbq_status gbq_ground_state_get_info(const gbq_ground_state* gs, gbq_ground_state_info* info) {
  return guarded([&] {
    need(gs, "gs");
    need(info, "info");
    const gbq::GroundState& g = gs->gs;
    *info = gbq_ground_state_info{g.alpha, g.dim, g.h1_norm_sq, g.c_star, g.eta, g.static_energy,
                                  g.pohozaev_residual, g.equation_residual, g.iterations};
  });
}

void gbq_ground_state_free(gbq_ground_state* gs) { delete gs; }

gbq_status gbq_run_ground_state(const gbq_ground_state_options* opts, const char* out_path, gbq_report** report) {
  return guarded([&] {
    need(opts, "opts");
    need(report, "report");
    gbq::GroundStateArgs a = to_args(*opts);
    a.out = opt_path(out_path);
    emit(gbq::ground_state_command(a), report);
  });
}

gbq_status gbq_run_evolve(const gbq_config* cfg, gbq_report** report) {
  return guarded([&] {
    need(cfg, "cfg");
    need(report, "report");
    emit(gbq::evolve_command(cfg->cfg), report);
  });
}

gbq_status gbq_run_classify(const gbq_config* cfg, const char* ground_state_path, int confirm, const char* csv_path,
                            gbq_report** report) {
  return guarded([&] {
    need(cfg, "cfg");
    need(report, "report");
    gbq::ClassifyArgs a;
    a.ground_state_path = opt_path(ground_state_path);
    a.confirm = confirm != 0;
    a.csv = opt_path(csv_path);
    emit(gbq::classify_command(cfg->cfg, a), report);
  });
}

gbq_status gbq_run_sweep(const gbq_sweep* sweep, int jobs, int timing, const char* csv_path, gbq_report** report) {
  return guarded([&] {
    need(sweep, "sweep");
    need(report, "report");
    gbq::SweepArgs a;
    a.jobs = jobs;
    a.timing = timing != 0;
    a.csv = opt_path(csv_path);
    emit(gbq::sweep_command(sweep->cfg, a), report);
  });
}

gbq_status gbq_run_decay_test(const gbq_decay_options* opts, const char* csv_path, gbq_report** report) {
  return guarded([&] {
    need(opts, "opts");
    need(report, "report");
    gbq::DecayArgs a;
    a.dim = opts->dim;
    if (opts->n_shells > 0) {
      need(opts->shells, "shells");
      a.shells.assign(opts->shells, opts->shells + opts->n_shells);
    }
    if (opts->width > 0.0) a.width = opts->width;
    a.points = opts->points > 0 ? opts->points : 0;
    a.box = opts->box > 0.0 ? opts->box : 0.0;
    if (opts->times && opts->n_times > 0) a.times.assign(opts->times, opts->times + opts->n_times);
    a.csv = opt_path(csv_path);
    emit(gbq::decay_command(a), report);
  });
}

gbq_status gbq_run_morawetz(const gbq_config* cfg, const double* radii, size_t n_radii, const char* csv_path,
                            gbq_report** report) {
  return guarded([&] {
    need(cfg, "cfg");
    need(report, "report");
    std::vector<double> r;
    if (n_radii > 0) {
      need(radii, "radii");
      r.assign(radii, radii + n_radii);
    }
    emit(gbq::morawetz_command(cfg->cfg, r, opt_path(csv_path)), report);
  });
}

gbq_status gbq_run_scattering(const gbq_config* cfg, double horizon, const char* csv_path, gbq_report** report) {
  return guarded([&] {
    need(cfg, "cfg");
    need(report, "report");
    emit(gbq::scattering_command(cfg->cfg, horizon, opt_path(csv_path)), report);
  });
}

const char* gbq_report_summary(const gbq_report* report) { return report ? report->result.summary.c_str() : ""; }

const char* gbq_report_csv(const gbq_report* report) { return report ? report->result.csv.c_str() : ""; }

const char* gbq_report_csv_path(const gbq_report* report) {
  return report ? report->result.csv_path.c_str() : "";
}

int gbq_report_contradiction(const gbq_report* report) { return report && report->result.contradiction ? 1 : 0; }

void gbq_report_free(gbq_report* report) { delete report; }

const char* gbq_csv_header(const char* kind, int dim) {
  static const std::string diag[3] = {gbq::csv_header(1), gbq::csv_header(2), gbq::csv_header(3)};
  if (!kind) return nullptr;
  const std::string k(kind);
  if (k == "diagnostics") return dim >= 1 && dim <= 3 ? diag[dim - 1].c_str() : nullptr;
  if (k == "sweep") return gbq::kSweepHeader;
  if (k == "decay") return gbq::kDecayHeader;
  if (k == "morawetz") return gbq::kMorawetzHeader;
  if (k == "scattering") return gbq::kScatteringHeader;
  return nullptr;
}

}  // extern "C"
