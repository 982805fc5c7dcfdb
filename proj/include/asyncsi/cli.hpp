#pragma once

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "asyncsi/acsitr.hpp"
#include "asyncsi/acsitr_sim.hpp"
#include "asyncsi/bsagp.hpp"
#include "asyncsi/bsagp_sim.hpp"
#include "asyncsi/bundles.hpp"
#include "asyncsi/channel_spec_io.hpp"
#include "asyncsi/gp.hpp"
#include "asyncsi/grid.hpp"
#include "asyncsi/no_si.hpp"
#include "asyncsi/segment_ts_sim.hpp"
#include "asyncsi/theorem1.hpp"
#include "asyncsi/training.hpp"
#include "asyncsi/xor_process.hpp"

namespace asyncsi {

// Exit codes: 0 success, 2 spec error, 3 guard violation, 4 failed
// certification.
enum ExitCode : int { kOk = 0, kSpecError = 2, kGuardViolation = 3, kCertFailure = 4 };

namespace cli_detail {

struct Output {
  std::ostream* os = nullptr;
  std::ofstream file;

  void open(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      os = &fallback;
      return;
    }
    file.open(path);
    if (!file) throw SpecParseError("cannot open output file " + path);
    os = &file;
  }
};

inline std::string cert_status(const SolveReport& r) {
  if (std::isnan(r.grid_value)) return "-";
  return r.grid_certified ? "certified" : "uncertified";
}

inline std::string rates_row(const std::string& quantity, const SolveReport& r) {
  return quantity + "," + format_rate(r.value) + "," + r.method + "," +
         format_rate(r.convergence_gap) + "," + cert_status(r);
}

// The XOR-compensating auxiliary (U uniform, X = U xor A) used by the
// built-in binary instances.
inline AuxDistribution bsagp_aux() {
  std::vector<double> q(8, 0.0);
  for (int a = 0; a < 2; ++a)
    for (int u = 0; u < 2; ++u) q[static_cast<std::size_t>((a * 2 + u) * 2 + (u ^ a))] = 0.5;
  return AuxDistribution(2, 2, 2, std::move(q));
}

inline double averaged_mi(const StateChannel& ch, std::span<const double> px) {
  const std::vector<double> wbar = ch.averaged();
  return detail::channel_mi(px, wbar.data(), ch.nx(), ch.ny());
}

}  // namespace cli_detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"achievable rates and coding simulations for state-dependent channels "
               "with asynchronous side information"};
  app.name("asyncsi");

  // ---- rates ----
  auto* rates = app.add_subcommand("rates", "single-letter rates and capacities");
  std::string rates_channel, rates_delays, rates_out;
  std::vector<std::string> rates_quantities;
  std::uint64_t rates_seed = 1;
  int rates_starts = 64, rates_nu = 0;
  rates->add_option("--channel", rates_channel, "spec file or bsagp:p=<real>")->required();
  rates->add_option("--delays", rates_delays, "delay range a..b (overrides the spec file)");
  rates->add_option("--quantity", rates_quantities,
                    "gp|agp_t1|theorem2|theorem3|acsitr|no_si|feedback|closed_form")
      ->required();
  rates->add_option("--seed", rates_seed, "search seed");
  rates->add_option("--starts", rates_starts, "multi-start count");
  rates->add_option("--nu", rates_nu, "auxiliary cardinality (0 = |X||S|)");
  rates->add_option("--out", rates_out, "output path (default stdout)");

  // ---- fig4 ----
  auto* fig4 = app.add_subcommand("fig4", "closed-form rate comparison over a p grid");
  double f4_from = 0.05, f4_to = 0.45, f4_step = 0.05;
  std::string fig4_out;
  fig4->add_option("--p-from", f4_from);
  fig4->add_option("--p-to", f4_to);
  fig4->add_option("--p-step", f4_step);
  fig4->add_option("--out", fig4_out);

  // ---- fig5 ----
  auto* fig5 = app.add_subcommand("fig5", "time-sharing rate versus the delay-set size");
  int f5_dmax = 4, f5_starts = 64;
  double f5_p = 0.5;
  std::uint64_t f5_seed = 1;
  std::string fig5_out;
  fig5->add_option("--dmax", f5_dmax, "largest delay-set size (<= 8)");
  fig5->add_option("--p", f5_p, "state crossover probability");
  fig5->add_option("--starts", f5_starts);
  fig5->add_option("--seed", f5_seed);
  fig5->add_option("--out", fig5_out);

  // ---- simulate ----
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo coding-scheme runs");
  simulate->require_subcommand(1);

  auto* sim_bsagp = simulate->add_subcommand("bsagp", "explicit binary scheme");
  double sb_p = 0.5, sb_rate = 0.4, sb_eps = 0.1;
  int sb_n = 64;
  long sb_trials = 2000, sb_refresh = 100;
  std::string sb_delays = "0..1", sb_mode = "auto", sb_out;
  std::uint64_t sb_seed = 0;
  int sb_fixed_delay = 0;
  bool sb_fix = false;
  sim_bsagp->add_option("--p", sb_p);
  sim_bsagp->add_option("--n", sb_n);
  sim_bsagp->add_option("--rate", sb_rate);
  sim_bsagp->add_option("--delays", sb_delays);
  sim_bsagp->add_option("--trials", sb_trials);
  sim_bsagp->add_option("--seed", sb_seed)->required();
  sim_bsagp->add_option("--epsilon", sb_eps);
  sim_bsagp->add_option("--refresh", sb_refresh, "trials per codebook (0 = one codebook)");
  sim_bsagp->add_option("--mode", sb_mode, "auto|materialized|ensemble");
  sim_bsagp->add_flag("--fix-delay", sb_fix, "fix the true delay instead of drawing it");
  sim_bsagp->add_option("--fixed-delay", sb_fixed_delay);
  sim_bsagp->add_option("--out", sb_out);

  auto* sim_seg = simulate->add_subcommand("segment_ts", "binning + segment time sharing, D = {0,1}");
  double sg_p = 0.5, sg_r = 0.25, sg_j = 0.125, sg_eps = 0.2;
  int sg_n = 32, sg_delay = 0;
  long sg_trials = 500, sg_refresh = 100;
  std::uint64_t sg_seed = 0;
  std::string sg_out;
  sim_seg->add_option("--p", sg_p, "built-in binary instance crossover probability");
  sim_seg->add_option("--n", sg_n);
  sim_seg->add_option("--rate-r", sg_r);
  sim_seg->add_option("--rate-j", sg_j);
  sim_seg->add_option("--epsilon", sg_eps);
  sim_seg->add_option("--delay", sg_delay, "true delay (0 or 1)");
  sim_seg->add_option("--trials", sg_trials);
  sim_seg->add_option("--seed", sg_seed)->required();
  sim_seg->add_option("--refresh", sg_refresh);
  sim_seg->add_option("--out", sg_out);

  auto* sim_acsitr = simulate->add_subcommand("acsitr", "strategy-letter scheme");
  std::string sa_channel, sa_delays, sa_mode = "auto", sa_out;
  double sa_rate = 0.8, sa_eps = 0.25;
  int sa_n = 48, sa_fixed_delay = 0;
  long sa_trials = 2000, sa_refresh = 100;
  std::uint64_t sa_seed = 0;
  bool sa_fix = false;
  sim_acsitr->add_option("--channel", sa_channel)->required();
  sim_acsitr->add_option("--delays", sa_delays);
  sim_acsitr->add_option("--n", sa_n);
  sim_acsitr->add_option("--rate", sa_rate);
  sim_acsitr->add_option("--epsilon", sa_eps);
  sim_acsitr->add_option("--trials", sa_trials);
  sim_acsitr->add_option("--seed", sa_seed)->required();
  sim_acsitr->add_option("--refresh", sa_refresh);
  sim_acsitr->add_option("--mode", sa_mode, "auto|materialized|ensemble");
  sim_acsitr->add_flag("--fix-delay", sa_fix);
  sim_acsitr->add_option("--fixed-delay", sa_fixed_delay);
  sim_acsitr->add_option("--out", sa_out);

  auto* sim_delay = simulate->add_subcommand("delay", "training-based delay estimation");
  double sd_p = 0.5;
  int sd_seglen = 32;
  long sd_runs = 1000;
  std::uint64_t sd_seed = 0;
  std::string sd_mode = "blind", sd_delays = "0..1", sd_out;
  sim_delay->add_option("--p", sd_p);
  sim_delay->add_option("--segment-length", sd_seglen);
  sim_delay->add_option("--runs", sd_runs);
  sim_delay->add_option("--seed", sd_seed)->required();
  sim_delay->add_option("--mode", sd_mode, "blind|known-states");
  sim_delay->add_option("--delays", sd_delays);
  sim_delay->add_option("--out", sd_out);

  // ---- certify ----
  auto* cert = app.add_subcommand("certify", "grid-oracle certification of solver values");
  std::string ct_quantity, ct_channel, ct_delays, ct_out;
  int ct_resolution = 0, ct_nu = 2;
  std::uint64_t ct_seed = 1;
  cert->add_option("--quantity", ct_quantity, "gp|theorem1|acsitr|no_si")->required();
  cert->add_option("--channel", ct_channel)->required();
  cert->add_option("--delays", ct_delays);
  cert->add_option("--resolution", ct_resolution, "grid denominator (0 = per-quantity default)");
  cert->add_option("--nu", ct_nu, "auxiliary cardinality for gp/theorem1 grids");
  cert->add_option("--seed", ct_seed);
  cert->add_option("--out", ct_out);

  app.require_subcommand(1);

  std::vector<const char*> argv;
  argv.push_back("asyncsi");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kSpecError;
  }

  try {
    if (rates->parsed()) {
      ChannelSpec spec = parse_channel_arg(rates_channel);
      if (!rates_delays.empty()) spec.delays = parse_delay_range(rates_delays);
      cli_detail::Output o;
      o.open(rates_out, out);
      std::string echo = "rates --channel " + rates_channel;
      if (!rates_delays.empty()) echo += " --delays " + rates_delays;
      for (const auto& q : rates_quantities) echo += " --quantity " + q;
      echo += " --seed " + std::to_string(rates_seed) + " --starts " + std::to_string(rates_starts) +
              " --nu " + std::to_string(rates_nu);
      *o.os << "# command: asyncsi " << echo << "\n";
      *o.os << "quantity,value,method,gap,certified\n";

      SearchConfig cfg;
      cfg.nu = rates_nu;
      cfg.ascent.starts = rates_starts;
      cfg.ascent.seed = rates_seed;
      for (const auto& q : rates_quantities) {
        if (q == "closed_form") {
          if (rates_channel.rfind("bsagp:p=", 0) != 0) {
            throw SpecParseError("closed_form needs the bsagp:p= shorthand");
          }
          const double p = std::stod(rates_channel.substr(8));
          SolveReport r;
          r.value = bsagp_closed_form(p);
          r.method = "closed-form";
          *o.os << cli_detail::rates_row(q, r) << "\n";
        } else if (q == "gp") {
          *o.os << cli_detail::rates_row(q, gp_capacity(spec.channel, cfg)) << "\n";
        } else if (q == "feedback") {
          *o.os << cli_detail::rates_row(q, agp_feedback_capacity(spec.channel, cfg)) << "\n";
        } else if (q == "agp_t1") {
          *o.os << cli_detail::rates_row(q, agp_theorem1_rate(spec.channel, spec.delays.size(), cfg))
                << "\n";
        } else if (q == "no_si") {
          *o.os << cli_detail::rates_row(q, no_si_capacity(spec.channel)) << "\n";
        } else if (q == "acsitr") {
          *o.os << cli_detail::rates_row(q, acsitr_capacity(spec.channel, spec.delays)) << "\n";
        } else if (q == "theorem2" || q == "theorem3") {
          if (spec.delays.size() != 2) {
            throw SpecParseError(q + " needs a delay set of size 2");
          }
          BundleCardinalities cards;
          SolveReport r = theorem2_rate_search(spec.channel, cards, cfg);
          if (q == "theorem3") {
            CompoundAuxBundle arg(Pmf::uniform(1), cards.nw, cards.nu, spec.channel.nx(),
                                  spec.channel.ns(), 2, r.argument);
            r.value = theorem3_rate_eval(spec.channel, spec.delays, arg);
            r.method += " (theorem3 eval at the searched bundle)";
          }
          *o.os << cli_detail::rates_row(q, r) << "\n";
        } else {
          throw SpecParseError("unknown quantity '" + q + "'");
        }
      }
      return kOk;
    }

    if (fig4->parsed()) {
      cli_detail::Output o;
      o.open(fig4_out, out);
      *o.os << "# command: asyncsi fig4 --p-from " << format_rate(f4_from) << " --p-to "
            << format_rate(f4_to) << " --p-step " << format_rate(f4_step) << "\n";
      *o.os << "p,no_si,r_l,gp\n";
      for (double p = f4_from; p <= f4_to + 1e-12; p += f4_step) {
        *o.os << format_rate(p) << "," << format_rate(1.0 - binary_entropy(p)) << ","
              << format_rate(bsagp_closed_form(p)) << "," << format_rate(1.0) << "\n";
      }
      return kOk;
    }

    if (fig5->parsed()) {
      if (f5_dmax < 1 || f5_dmax > 8) throw GuardError("fig5: D must be in 1..8");
      cli_detail::Output o;
      o.open(fig5_out, out);
      *o.os << "# command: asyncsi fig5 --dmax " << f5_dmax << " --p " << format_rate(f5_p)
            << " --starts " << f5_starts << " --seed " << f5_seed << "\n";
      *o.os << "d_size,time_share,theorem1_rate\n";
      StateChannel ch = StateChannel::xor_binary(f5_p);
      for (int d = 1; d <= f5_dmax; ++d) {
        SearchConfig cfg;
        cfg.ascent.starts = f5_starts;
        cfg.ascent.seed = f5_seed + static_cast<std::uint64_t>(d);
        SolveReport r = agp_theorem1_rate(ch, d, cfg);
        *o.os << d << "," << format_rate(1.0 / d) << "," << format_rate(r.value) << "\n";
      }
      return kOk;
    }

    if (sim_bsagp->parsed()) {
      BsagpConfig cfg;
      cfg.p = sb_p;
      cfg.n = sb_n;
      cfg.rate = sb_rate;
      cfg.delays = parse_delay_range(sb_delays);
      cfg.trials = sb_trials;
      cfg.seed = sb_seed;
      cfg.epsilon = sb_eps;
      cfg.codebook_refresh = sb_refresh;
      cfg.fix_delay = sb_fix;
      cfg.fixed_delay = sb_fixed_delay;
      if (sb_mode == "materialized") cfg.mode = BsagpConfig::Mode::kMaterialized;
      else if (sb_mode == "ensemble") cfg.mode = BsagpConfig::Mode::kEnsemble;
      else if (sb_mode != "auto") throw SpecParseError("unknown mode '" + sb_mode + "'");
      TrialReport r = bsagp_simulate(cfg);
      cli_detail::Output o;
      o.open(sb_out, out);
      *o.os << "# command: asyncsi simulate bsagp --p " << format_rate(sb_p) << " --n " << sb_n
            << " --rate " << format_rate(sb_rate) << " --delays " << sb_delays << " --trials "
            << sb_trials << " --seed " << sb_seed << " --epsilon " << format_rate(sb_eps)
            << " --refresh " << sb_refresh << " --mode " << sb_mode
            << (sb_fix ? " --fix-delay --fixed-delay " + std::to_string(sb_fixed_delay) : "")
            << "\n";
      *o.os << TrialReport::csv_header() << "\n" << r.to_csv_rows();
      return kOk;
    }

    if (sim_seg->parsed()) {
      StateChannel ch = StateChannel::xor_binary(sg_p);
      AuxDistribution aux = cli_detail::bsagp_aux();
      SegmentTsConfig cfg;
      cfg.n = sg_n;
      cfg.rate_r = sg_r;
      cfg.rate_j = sg_j;
      cfg.epsilon = sg_eps;
      cfg.true_delay = sg_delay;
      cfg.trials = sg_trials;
      cfg.seed = sg_seed;
      cfg.codebook_refresh = sg_refresh;
      TrialReport r = segment_ts_simulate(ch, aux, cfg);
      r.channel_id = "bsagp:p=" + format_rate(sg_p);
      cli_detail::Output o;
      o.open(sg_out, out);
      *o.os << "# command: asyncsi simulate segment_ts --p " << format_rate(sg_p) << " --n " << sg_n
            << " --rate-r " << format_rate(sg_r) << " --rate-j " << format_rate(sg_j)
            << " --epsilon " << format_rate(sg_eps) << " --delay " << sg_delay << " --trials "
            << sg_trials << " --seed " << sg_seed << " --refresh " << sg_refresh << "\n";
      *o.os << "# events: e1=" << r.e1 << " e2=" << r.e2 << " e3=" << r.e3 << "\n";
      *o.os << TrialReport::csv_header() << "\n" << r.to_csv_rows();
      return kOk;
    }

    if (sim_acsitr->parsed()) {
      ChannelSpec spec = parse_channel_arg(sa_channel);
      if (!sa_delays.empty()) spec.delays = parse_delay_range(sa_delays);
      AcsitrSimConfig cfg;
      cfg.n = sa_n;
      cfg.rate = sa_rate;
      cfg.epsilon = sa_eps;
      cfg.trials = sa_trials;
      cfg.seed = sa_seed;
      cfg.codebook_refresh = sa_refresh;
      cfg.fix_delay = sa_fix;
      cfg.fixed_delay = sa_fixed_delay;
      if (sa_mode == "materialized") cfg.mode = AcsitrSimConfig::Mode::kMaterialized;
      else if (sa_mode == "ensemble") cfg.mode = AcsitrSimConfig::Mode::kEnsemble;
      else if (sa_mode != "auto") throw SpecParseError("unknown mode '" + sa_mode + "'");
      TrialReport r = acsitr_simulate(spec.channel, spec.delays, cfg);
      r.channel_id = spec.id;
      cli_detail::Output o;
      o.open(sa_out, out);
      *o.os << "# command: asyncsi simulate acsitr --channel " << sa_channel
            << (sa_delays.empty() ? "" : " --delays " + sa_delays) << " --n " << sa_n << " --rate "
            << format_rate(sa_rate) << " --epsilon " << format_rate(sa_eps) << " --trials "
            << sa_trials << " --seed " << sa_seed << " --refresh " << sa_refresh << " --mode "
            << sa_mode
            << (sa_fix ? " --fix-delay --fixed-delay " + std::to_string(sa_fixed_delay) : "")
            << "\n";
      *o.os << TrialReport::csv_header() << "\n" << r.to_csv_rows();
      return kOk;
    }

    if (sim_delay->parsed()) {
      StateChannel ch = StateChannel::xor_binary(sd_p);
      TrainingPlan plan;
      plan.delays = parse_delay_range(sd_delays);
      plan.segment_length = sd_seglen;
      plan.f = {0, 1};
      long correct = 0;
      const std::vector<int> dvals = plan.delays.delays();
      for (long r = 0; r < sd_runs; ++r) {
        Rng rng = Rng::derived(sd_seed, {0xDE1Au, static_cast<std::uint64_t>(r)});
        const int d_true = dvals[static_cast<std::size_t>(rng.index(dvals.size()))];
        if (sd_mode == "blind") {
          std::vector<int> y = run_training_observation(ch, plan, d_true, rng.next_u64());
          if (estimate_delay(ch, plan, y, nullptr, 0).d_hat == d_true) ++correct;
        } else if (sd_mode == "known-states") {
          auto [y, s] = run_training_channel_delay(ch, plan, d_true, rng.next_u64());
          if (estimate_delay(ch, plan, y, &s, 0).d_hat == d_true) ++correct;
        } else {
          throw SpecParseError("unknown mode '" + sd_mode + "'");
        }
      }
      cli_detail::Output o;
      o.open(sd_out, out);
      *o.os << "# command: asyncsi simulate delay --p " << format_rate(sd_p) << " --segment-length "
            << sd_seglen << " --runs " << sd_runs << " --seed " << sd_seed << " --mode " << sd_mode
            << " --delays " << sd_delays << "\n";
      *o.os << "mode,segment_length,runs,correct,success_rate,seed\n";
      *o.os << sd_mode << "," << sd_seglen << "," << sd_runs << "," << correct << ","
            << format_rate(static_cast<double>(correct) / static_cast<double>(sd_runs)) << ","
            << sd_seed << "\n";
      return kOk;
    }

    if (cert->parsed()) {
      ChannelSpec spec = parse_channel_arg(ct_channel);
      if (!ct_delays.empty()) spec.delays = parse_delay_range(ct_delays);
      const StateChannel& ch = spec.channel;
      CertificationRecord rec;
      if (ct_quantity == "no_si") {
        SolveReport r = no_si_capacity(ch);
        rec = certify(
            r, [&](std::span<const double> p) { return cli_detail::averaged_mi(ch, p); },
            GridSpec{{ch.nx()}, ct_resolution > 0 ? ct_resolution : 64}, ct_quantity);
      } else if (ct_quantity == "acsitr") {
        SolveReport r = acsitr_capacity(ch, spec.delays);
        const int nv = detail::ipow(ch.ns(), spec.delays.size());
        rec = certify(
            r,
            [&](std::span<const double> p) {
              StrategyPmf strat(nv, ch.nx(), std::vector<double>(p.begin(), p.end()));
              double worst = 1e300;
              for (int d : spec.delays.delays()) {
                worst = std::min(worst, acsitr_objective(ch, spec.delays, strat, d));
              }
              return worst;
            },
            GridSpec{std::vector<int>(static_cast<std::size_t>(nv), ch.nx()),
                     ct_resolution > 0 ? ct_resolution : 64},
            ct_quantity);
      } else if (ct_quantity == "gp" || ct_quantity == "theorem1") {
        const int d_size = ct_quantity == "gp" ? 1 : spec.delays.size();
        SearchConfig cfg;
        cfg.nu = ct_nu;
        cfg.ascent.seed = ct_seed;
        SolveReport r = ct_quantity == "gp" ? gp_capacity(ch, cfg)
                                            : agp_theorem1_rate(ch, d_size, cfg);
        detail::Theorem1Machine machine(ch, ct_nu, d_size);
        rec = certify(
            r, [&](std::span<const double> q) { return machine.value(q); },
            GridSpec{machine.blocks(), ct_resolution > 0 ? ct_resolution : 16}, ct_quantity);
      } else {
        throw SpecParseError("unknown quantity '" + ct_quantity + "'");
      }
      cli_detail::Output o;
      o.open(ct_out, out);
      *o.os << "# command: asyncsi certify --quantity " << ct_quantity << " --channel "
            << ct_channel << (ct_delays.empty() ? "" : " --delays " + ct_delays)
            << " --resolution " << ct_resolution << " --nu " << ct_nu << " --seed " << ct_seed
            << "\n";
      *o.os << CertificationRecord::csv_header() << "\n" << rec.to_csv_row() << "\n";
      if (rec.status == "pass") return kOk;
      return rec.status == "uncertified" ? kGuardViolation : kCertFailure;
    }
  } catch (const SpecParseError& e) {
    err << "error: " << e.what() << "\n";
    return kSpecError;
  } catch (const GuardError& e) {
    err << "guard: " << e.what() << "\n";
    return kGuardViolation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kSpecError;
  }
  return kOk;
}

}  // namespace asyncsi
