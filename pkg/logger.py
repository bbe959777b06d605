"""
Logger Module
Appends one JSON line per CLI run and summarises the run history
"""

import json
import os
from datetime import datetime
from typing import Any, Dict, List, Optional, Sequence

DEFAULT_LOG_FILE = "eisenstein_runs.jsonl"


class RunLogger:
    """
    Logs compute/verify runs and provides analytics.

    The log is write-only from the point of view of the computation: nothing
    read back from it influences a result.
    """

    def __init__(self, log_file: str = DEFAULT_LOG_FILE):
        """
        Initialize the logger.

        Args:
            log_file: Path to the log file (JSONL format)
        """
        self.log_file = log_file
        self.session_start = datetime.now()
        self.session_id = self.session_start.strftime("%Y%m%d_%H%M%S")

    def log_run(self, command: str,
                config_hash: Optional[str] = None,
                mode: str = "unknown",
                status: str = "ok",
                elapsed: float = 0.0,
                cache_hit: bool = False,
                failures: Sequence[str] = (),
                label: str = "") -> None:
        """
        Log a single run.

        Args:
            command: compute / verify
            config_hash: Content hash of the job configuration
            mode: Mode actually used (exact/numeric, or mixed)
            status: ok / usage_error / verification_failed / budget_exceeded
            elapsed: Wall-clock seconds
            cache_hit: Whether the result came from the coefficient cache
            failures: Names of failed properties
            label: Short description of the lattice
        """
        entry = {
            'timestamp': datetime.now().isoformat(),
            'session_id': self.session_id,
            'command': command,
            'config_hash': config_hash,
            'mode': mode,
            'status': status,
            'elapsed': round(elapsed, 4),
            'cache_hit': cache_hit,
            'failures': list(failures),
            'label': label,
        }
        try:
            with open(self.log_file, 'a', encoding='utf-8') as f:
                f.write(json.dumps(entry) + '\n')
        except OSError as e:
            print(f"Warning: Could not write to log file: {e}")

    def get_logs(self, limit: int = 100) -> List[Dict[str, Any]]:
        """
        Retrieve recent log entries; unreadable lines are skipped.

        Args:
            limit: Maximum number of entries to return
        """
        if not os.path.exists(self.log_file):
            return []
        logs = []
        with open(self.log_file, 'r', encoding='utf-8') as f:
            for line in f:
                if not line.strip():
                    continue
                try:
                    logs.append(json.loads(line))
                except json.JSONDecodeError:
                    continue
        return logs[-limit:]

    def get_analytics(self) -> Dict[str, Any]:
        """
        Summarise the run log.

        Returns:
            Runs per command, modes, statuses, cache-hit rate, most frequent
            failures and the slowest configurations
        """
        logs = self.get_logs(limit=100000)
        if not logs:
            return {'total_runs': 0, 'message': 'No runs logged'}

        total = len(logs)
        commands: Dict[str, int] = {}
        modes: Dict[str, int] = {}
        statuses: Dict[str, int] = {}
        failure_counts: Dict[str, int] = {}
        for log in logs:
            commands[log.get('command', 'unknown')] = commands.get(log.get('command', 'unknown'), 0) + 1
            modes[log.get('mode', 'unknown')] = modes.get(log.get('mode', 'unknown'), 0) + 1
            statuses[log.get('status', 'unknown')] = statuses.get(log.get('status', 'unknown'), 0) + 1
            for name in log.get('failures', []):
                failure_counts[name] = failure_counts.get(name, 0) + 1

        computes = [log for log in logs if log.get('command') == 'compute']
        hits = sum(1 for log in computes if log.get('cache_hit'))

        slowest: Dict[str, Dict[str, Any]] = {}
        for log in logs:
            key = log.get('config_hash')
            if not key:
                continue
            if key not in slowest or log.get('elapsed', 0) > slowest[key]['elapsed']:
                slowest[key] = {'config_hash': key, 'label': log.get('label', ''),
                                'elapsed': log.get('elapsed', 0)}

        return {
            'total_runs': total,
            'commands': commands,
            'modes': modes,
            'statuses': statuses,
            'cache_hit_rate': (hits / len(computes)) if computes else 0.0,
            'average_elapsed': sum(log.get('elapsed', 0) for log in logs) / total,
            'top_failures': [{'property': name, 'count': count} for name, count in
                             sorted(failure_counts.items(), key=lambda x: (-x[1], x[0]))[:10]],
            'slowest_configs': sorted(slowest.values(), key=lambda x: -x['elapsed'])[:5],
            'session_count': len(set(log.get('session_id') for log in logs)),
        }

    def export_analytics_report(self, output_file: str = "analytics_report.json") -> None:
        """
        Export analytics to a JSON file.

        Args:
            output_file: Path for the output file
        """
        analytics = self.get_analytics()
        try:
            with open(output_file, 'w', encoding='utf-8') as f:
                json.dump(analytics, f, indent=2)
            print(f"✓ Analytics report exported to {output_file}")
        except OSError as e:
            print(f"Error exporting analytics: {e}")

    def print_analytics(self) -> None:
        """Print analytics to console."""
        analytics = self.get_analytics()

        print("\n" + "=" * 60)
        print("RUN ANALYTICS")
        print("=" * 60)
        print(f"Total Runs: {analytics.get('total_runs', 0)}")
        if not analytics.get('total_runs'):
            print("=" * 60)
            return
        print(f"Sessions: {analytics.get('session_count', 0)}")
        print(f"Cache Hit Rate (compute): {analytics.get('cache_hit_rate', 0):.1%}")
        print(f"Average Elapsed: {analytics.get('average_elapsed', 0):.3f}s")

        print("\nCommands:")
        for command, count in sorted(analytics.get('commands', {}).items()):
            print(f"  - {command}: {count}")

        print("\nModes Used:")
        for mode, count in sorted(analytics.get('modes', {}).items()):
            print(f"  - {mode}: {count}")

        print("\nStatuses:")
        for status, count in sorted(analytics.get('statuses', {}).items()):
            print(f"  - {status}: {count}")

        if analytics.get('top_failures'):
            print("\nMost Frequent Failures:")
            for item in analytics['top_failures'][:5]:
                print(f"  - {item['property']}: {item['count']} times")

        print("\nSlowest Configurations:")
        for item in analytics.get('slowest_configs', []):
            print(f"  - {item['config_hash'][:12]} {item['label']}: {item['elapsed']:.3f}s")

        print("=" * 60)
