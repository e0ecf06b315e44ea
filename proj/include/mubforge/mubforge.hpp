#pragma once

#include "mubforge/errorbasis.hpp"
#include "mubforge/field.hpp"
#include "mubforge/groups.hpp"
#include "mubforge/linalg.hpp"
#include "mubforge/mub.hpp"
#include "mubforge/nets.hpp"
#include "mubforge/report.hpp"
