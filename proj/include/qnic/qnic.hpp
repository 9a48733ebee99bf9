#pragma once

#include "qnic/core/coherent.hpp"
#include "qnic/core/errors.hpp"
#include "qnic/core/fock.hpp"
#include "qnic/core/format.hpp"
#include "qnic/core/heterodyne.hpp"
#include "qnic/core/quadrature.hpp"
#include "qnic/core/random.hpp"
#include "qnic/core/special.hpp"
#include "qnic/core/types.hpp"

#include "qnic/channels/channels.hpp"

#include "qnic/hwsim/hwsim.hpp"
#include "qnic/hwsim/records_io.hpp"

#include "qnic/secanalysis/budget.hpp"
#include "qnic/secanalysis/optimize.hpp"
#include "qnic/secanalysis/perr.hpp"
#include "qnic/secanalysis/qds.hpp"
#include "qnic/secanalysis/rates.hpp"
#include "qnic/secanalysis/region.hpp"

#include "qnic/protostack/apps.hpp"
#include "qnic/protostack/elimination.hpp"
#include "qnic/protostack/keyproto.hpp"
#include "qnic/protostack/keys.hpp"
#include "qnic/protostack/links.hpp"
#include "qnic/protostack/middleware.hpp"
#include "qnic/protostack/qds.hpp"
#include "qnic/protostack/report.hpp"

#include "qnic/cli/commands.hpp"
#include "qnic/cli/config.hpp"
