#pragma once

#include "cocomp/error.hpp"
#include "cocomp/tolerance.hpp"
#include "cocomp/cpu_profile.hpp"
#include "cocomp/energy.hpp"
#include "cocomp/tunnel.hpp"
#include "cocomp/string_pull.hpp"
#include "cocomp/convex_oracle.hpp"
#include "cocomp/golden_section.hpp"
#include "cocomp/partition.hpp"
#include "cocomp/text_io.hpp"
