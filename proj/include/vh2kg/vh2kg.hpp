#pragma once

#include "vh2kg/analytics.hpp"
#include "vh2kg/error.hpp"
#include "vh2kg/home.hpp"
#include "vh2kg/kg.hpp"
#include "vh2kg/kmeans.hpp"
#include "vh2kg/pipeline.hpp"
#include "vh2kg/rdf.hpp"
#include "vh2kg/risk.hpp"
#include "vh2kg/script.hpp"
#include "vh2kg/simulator.hpp"
#include "vh2kg/skipgram.hpp"
#include "vh2kg/walks.hpp"
