import json
import logging
from datetime import datetime

from django.http import JsonResponse
from django.views.decorators.csrf import csrf_exempt
from django.views.decorators.http import require_http_methods

from .complexity import summarize
from .engine import Algorithm, BudgetRule, run
from .exceptions import InputError, S2LabError
from .graph_core import Graph, Labeling
from .models import BenchRecord
from .oracle import NoisyOracle, repetitions_needed
from .utils import parse_budget
from . import config

logger = logging.getLogger(__name__)


def health_check(request):
    """Health check endpoint"""
    return JsonResponse({
        'status': 'healthy',
        'timestamp': datetime.now().isoformat(),
        'service': 's2lab',
        'version': '1.0.0'
    })


def _instance_from_request(data):
    """Graph and total labeling from {'n': .., 'edges': [[u, v], ..], 'labels': [+1/-1, ..]}"""
    try:
        n = int(data['n'])
        edges = [(int(u), int(v)) for u, v in data.get('edges', [])]
        labels = [int(x) for x in data['labels']]
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"Expected 'n', 'edges' and 'labels': {e}")
    if len(labels) != n:
        raise InputError(f"Expected {n} labels, got {len(labels)}")
    return Graph.from_edges(n, edges), Labeling.from_sequence(labels)


def _json_body(request):
    try:
        return json.loads(request.body)
    except json.JSONDecodeError:
        raise InputError("Invalid JSON data")


@csrf_exempt
@require_http_methods(["POST"])
def analyze(request):
    try:
        g, f = _instance_from_request(_json_body(request))
        summary = summarize(g, f)
    except S2LabError as e:
        return JsonResponse({"error": str(e)}, status=e.http_status)
    return JsonResponse(summary.to_dict())


@csrf_exempt
@require_http_methods(["POST"])
def run_view(request):
    try:
        data = _json_body(request)
        g, f = _instance_from_request(data)
        algorithm = Algorithm(data.get('algorithm', 's2'))
        gamma = float(data.get('gamma', 0.0))
        epsilon = float(data.get('epsilon', config.DEFAULT_EPSILON))
        seed = int(data.get('seed', config.DEFAULT_SEED))
        budget = parse_budget(data.get('budget')) or g.n
        if budget == 'auto':
            budget = min(g.n, summarize(g, f).budget(epsilon))
        repetitions = 1 if gamma == 0 else repetitions_needed(gamma, g.n, epsilon)
        oracle = NoisyOracle(f, gamma, int(data.get('oracle_seed', seed)))
        result = run(algorithm, g, oracle, BudgetRule(budget), seed, truth=f, repetitions=repetitions)
    except ValueError as e:
        status = e.http_status if isinstance(e, S2LabError) else 400
        return JsonResponse({"error": str(e)}, status=status)
    except S2LabError as e:
        return JsonResponse({"error": str(e)}, status=e.http_status)

    return JsonResponse({
        "summary": result.summary(),
        "log": [[r.step, r.phase.value, r.vertex, r.label] for r in result.log],
        "found_cuts": sorted([list(e) for e in result.found_cuts]),
        "predicted": [result.predicted[v] for v in range(g.n)],
    })


@require_http_methods(["GET"])
def bench_records(request):
    try:
        limit = max(1, min(int(request.GET.get('limit', 50)), 500))
    except ValueError:
        return JsonResponse({"error": "limit must be an integer"}, status=400)
    records = [record.as_dict() for record in BenchRecord.objects.all()[:limit]]
    return JsonResponse({"records": records})
