#pragma once

#include "vddc/channel.hpp"
#include "vddc/config.hpp"
#include "vddc/contract.hpp"
#include "vddc/csv.hpp"
#include "vddc/errors.hpp"
#include "vddc/experiment.hpp"
#include "vddc/game.hpp"
#include "vddc/oracle.hpp"
#include "vddc/phc.hpp"
#include "vddc/rng.hpp"
