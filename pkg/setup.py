from setuptools import setup, find_packages

requirements = []
with open('requirements.txt') as f:
    requirements = f.read().splitlines()

readme = ''
with open('README.md') as f:
    readme = f.read()

setup(
    author='AlgoÉTS',
    name='DriftWiC',
    description='DriftWiC is a Python package that decides whether a target word keeps its meaning across two '
                'short texts, with mixture-of-experts fusion, adversarial training and ensembling.',
    long_description=readme,
    long_description_content_type='text/markdown',
    version='0.1.0',
    license='Apache 2.0',
    python_requires='>=3.8',
    package_dir={'': 'src'},
    packages=find_packages(where='src', exclude=['test']),
    package_data={'driftwic': ['resources/*.tsv']},
    include_package_data=True,
    install_requires=requirements,
    extras_require={'nltk': ['nltk']},
    entry_points={'console_scripts': ['driftwic=driftwic.cli:main']}
)
