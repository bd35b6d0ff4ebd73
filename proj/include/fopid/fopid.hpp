#ifndef FOPID_FOPID_HPP
#define FOPID_FOPID_HPP

#include "fopid/controller.hpp"
#include "fopid/frac_ops.hpp"
#include "fopid/ga.hpp"
#include "fopid/linear_system.hpp"
#include "fopid/process_models.hpp"
#include "fopid/rbf.hpp"
#include "fopid/reduction.hpp"
#include "fopid/scheduler.hpp"
#include "fopid/simulation.hpp"
#include "fopid/state_space.hpp"
#include "fopid/transfer_function.hpp"
#include "fopid/tuning.hpp"

#endif  // FOPID_FOPID_HPP
