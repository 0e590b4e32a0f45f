#pragma once

#include "vulnbench/error.hpp"
#include "vulnbench/sarif.hpp"
#include "vulnbench/corpus.hpp"
#include "vulnbench/system_prompt.hpp"
#include "vulnbench/prompt.hpp"
#include "vulnbench/chat_client.hpp"
#include "vulnbench/extract.hpp"
#include "vulnbench/llm_analyzer.hpp"
#include "vulnbench/matcher.hpp"
#include "vulnbench/metrics.hpp"
#include "vulnbench/result.hpp"
#include "vulnbench/report.hpp"
#include "vulnbench/config.hpp"
#include "vulnbench/runner.hpp"
