from setuptools import setup, find_packages

setup(
    name="pilot_beam_tool",
    version="1.0",
    package_dir={"": "src"},
    packages=find_packages(where="src"),
    package_data={"pilot_beam_tool": ["resources/*.yaml"]},
    python_requires=">=3.10",
    install_requires=[
        "numpy",
        "scipy",
        "pandas",
        "PyYAML",
        "pydantic",
        "click",
        "tqdm",
        "coloredlogs",
        "typing_extensions"
    ],
    entry_points={
        "console_scripts": [
            "pilot_beam_tool=pilot_beam_tool.cli:main",
        ],
    },
)
