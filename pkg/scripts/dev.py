#!/usr/bin/env python3
"""
Development helper script for nsmoo
Run common development tasks from one place
"""
import argparse
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
CONFIGS = ROOT / "data" / "configs"


def run_command(cmd, cwd=ROOT):
    """Run a command list, reporting failures instead of raising"""
    try:
        result = subprocess.run(cmd, cwd=cwd, check=True)
        return result.returncode == 0
    except subprocess.CalledProcessError as e:
        print(f"❌ Command failed: {' '.join(cmd)}")
        print(f"Error: {e}")
        return False


def run_tests(slow=False):
    """Run the test suite"""
    print("🧪 Running tests...")
    cmd = [sys.executable, "-m", "pytest", "-q"]
    if not slow:
        cmd += ["-m", "not slow"]
    return run_command(cmd)


def run_examples(out_dir):
    """Run every shipped configuration; the command is taken from the file name"""
    commands = {"solve": "solve", "cover": "cover", "scalarize": "scalarize", "ps": "scalarize",
                "path": "path", "infer": "infer"}
    ok = True
    for config in sorted(CONFIGS.glob("*.toml")):
        command = commands.get(config.stem.rsplit("_", 1)[-1])
        if command is None:
            print(f"⚠️  No command for {config.name}, skipping")
            continue
        print(f"▶️  {command} {config.name}")
        ok &= run_command([sys.executable, "-m", "nsmoo", command, "--config", str(config),
                           "--out", str(Path(out_dir) / config.stem)])
    return ok


def list_problems():
    """Show the problem catalog"""
    return run_command([sys.executable, "-m", "nsmoo", "problems", "list"])


def main():
    parser = argparse.ArgumentParser(description="nsmoo Development Helper")
    parser.add_argument("command", choices=["test", "examples", "problems", "setup"], help="Command to run")
    parser.add_argument("--slow", action="store_true", help="Include slow acceptance tests")
    parser.add_argument("--out", default="results", help="Output root for example runs")

    args = parser.parse_args()

    if args.command == "test":
        ok = run_tests(args.slow)
    elif args.command == "examples":
        ok = run_examples(args.out)
    elif args.command == "problems":
        ok = list_problems()
    else:
        print("🔧 Setting up nsmoo...")
        print("1. Installing dependencies...")
        ok = run_command([sys.executable, "-m", "pip", "install", "-r", "requirements.txt"])
        print("2. Running tests...")
        ok = ok and run_tests()
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
