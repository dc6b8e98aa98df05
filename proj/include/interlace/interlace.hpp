#pragma once

#include "interlace/config.hpp"
#include "interlace/errors.hpp"
#include "interlace/json_io.hpp"
#include "interlace/linalg.hpp"
#include "interlace/mixedchar.hpp"
#include "interlace/multipoly.hpp"
#include "interlace/partition.hpp"
#include "interlace/paving.hpp"
#include "interlace/realstable.hpp"
#include "interlace/unipoly.hpp"
