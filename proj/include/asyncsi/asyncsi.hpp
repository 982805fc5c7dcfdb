#pragma once

// Umbrella header: everything except the CLI front end (asyncsi/cli.hpp),
// which pulls in CLI11 and is only needed by command-line builds.

#include "asyncsi/acsitr.hpp"
#include "asyncsi/acsitr_sim.hpp"
#include "asyncsi/aux_dist.hpp"
#include "asyncsi/bsagp.hpp"
#include "asyncsi/bsagp_sim.hpp"
#include "asyncsi/bundles.hpp"
#include "asyncsi/channel.hpp"
#include "asyncsi/channel_spec_io.hpp"
#include "asyncsi/codebooks.hpp"
#include "asyncsi/errors.hpp"
#include "asyncsi/exact_error.hpp"
#include "asyncsi/gp.hpp"
#include "asyncsi/grid.hpp"
#include "asyncsi/joint_pmf.hpp"
#include "asyncsi/maximin.hpp"
#include "asyncsi/no_si.hpp"
#include "asyncsi/pair_laws.hpp"
#include "asyncsi/pmf.hpp"
#include "asyncsi/rng.hpp"
#include "asyncsi/sampling.hpp"
#include "asyncsi/segment_ts_sim.hpp"
#include "asyncsi/sim_common.hpp"
#include "asyncsi/simplex.hpp"
#include "asyncsi/solve_report.hpp"
#include "asyncsi/theorem1.hpp"
#include "asyncsi/training.hpp"
#include "asyncsi/typicality.hpp"
#include "asyncsi/xor_process.hpp"
