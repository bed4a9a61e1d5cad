#pragma once

#include "relshift/core.hpp"
#include "relshift/orbits.hpp"
#include "relshift/linkgeo.hpp"
#include "relshift/redshift.hpp"
#include "relshift/qkd.hpp"
#include "relshift/greop/schwarzschild.hpp"
#include "relshift/greop/geodesic.hpp"
#include "relshift/greop/tetrad.hpp"
#include "relshift/greop/eop.hpp"
#include "relshift/greop/deviation.hpp"
#include "relshift/scenarios/config.hpp"
#include "relshift/scenarios/presets.hpp"
#include "relshift/scenarios/run.hpp"
#include "relshift/scenarios/output.hpp"
