"""Prompt texts for the builtin elicitation tasks.

Each template is stored exactly as the agents should see it, with named
``str.format`` placeholders where observation values are substituted. Edit
with care: downstream parsing assumes the closing single-value /
two-value instruction stays intact.
"""

GENES_SYSTEM = (
    "Please imagine that you are a researcher working for a bio-technology company and you are studying the relationship between genes and proteins concerning gene expression. This process may or may not be modulated by the presence of proteins. You will be given information about some past results involving this gene/protein pair and you will be asked to make some predictions based on these information. The past results consist of two samples: 1) a sample of DNA fragments that had not been exposed to the protein, and 2) a sample of DNA fragments that had been exposed to the protein. The number of DNA fragments that resulted in gene expression in each of these samples will be shown to you. Because there are many causes of gene expression, some background factors besides the presence or absence of the protein may play a role in whether the gene is expressed or not. Your job is to make predictions concerning the effect of these proteins on gene expression and answer the question based on this."
)

GENES_BACKGROUND_QUESTION = (
    "Within sample 1 that had not been exposed to the protein, {k_minus} of {n_minus} DNA fragments were turned on; within sample 2 that had been exposed to the protein, {k_plus} of {n_plus} DNA fragments were turned on. Suppose that there is a sample of 100 DNA fragments and these fragments were not exposed to the protein, in how many of them would the gene be turned on? Please limit your answer to a single value without outputing anything else."
)

GENES_GENERATIVE_QUESTION = (
    "Within sample 1 that had not been exposed to the protein, {k_minus} of {n_minus} DNA fragments were turned on; within sample 2 that had been exposed to the protein, {k_plus} of {n_plus} DNA fragments were turned on. Suppose that there is a sample of 100 DNA fragments and that the gene is currently off in all those DNA fragments. If these 100 fragments were exposed to the protein, in how many of them would the gene be turned on? Please limit your answer to a single value without outputing anything else."
)

GENES_PREVENTIVE_QUESTION = (
    "Within sample 1 that had not been exposed to the protein, {k_minus} of {n_minus} DNA fragments were turned on; within sample 2 that had been exposed to the protein, {k_plus} of {n_plus} DNA fragments were turned on. Suppose that there is a sample of 100 DNA fragments and that the gene is currently on in all those DNA fragments. If these 100 fragments were exposed to the protein, in how many of them would the gene be turned off? Please limit your answer to a single value without outputing anything else."
)

PENCILS_SYSTEM = (
    "Please imagine that you are working for a pencil company and you are studying the relationship between a material called 'super lead' and machines called 'super lead detectors'. Pencil lead is made of carbon. Your company recently discovered that a new production process was resulting in a new carbon structure in their pencils—what they call 'super lead'. Since they are not sure which pencils they previously manufactured contain super lead, they are building a set of machines in order to detect it. These machines are programmed with different parameters to detect different types of carbon structures. You will be testing machines that are set up with different parameters. There are a number of trials in this experiment. Each trial involves a different type of super lead, and a super lead detector programmed with a different parameter set. You will see some information about how often the machine indicates the presence of super lead with a set of pencils that do not contain super lead, and how often with a set of pencils that do contain a particular type of super lead. You will be then asked to make some predictions based on these pieces of information."
)

PENCILS_QUESTION = (
    "With 16 pencils that do not contain super lead, the super lead detector indicated that {k_minus} of them contain super lead; with 16 pencils that contain super lead, the super lead detector indicated that {k_plus} of them contain super lead. Question: Suppose that there are 100 pencils that do not contain super lead, how many of them would be detected to contain super lead by the detector? And if there are 100 pencils that do contain super lead, how many of them would be detected to contain super lead by the detector? Please limit your answer into the 2 numeric values for the 2 questions, for example, (50, 50), without outputing anything else."
)

MEDICINES_SYSTEM = (
    "Please imagine that you are a researcher working for a medical company and you are studying the relationship between some allergy medicines and hormonal imbalance as a side effect of these medicines. Your company recently discovered that a new production process was resulting in changes in the molecular structures in the allergy medicines, and these new medicines cause abnormal levels of hormones in people. Since they are not sure which medicines they previously manufactured might cause anomalies in which type of hormone, you are tasked with investigating this. There are a number of trials in this experiment and each trial involves a different type of medicine and a different hormone. You will see some information about how often people who don’t take the medicine have a particular kind of hormonal imbalance, and how often people who take that medicine have the same kind of hormonal imbalance. You will be then asked to make some predictions based on these pieces of information."
)

MEDICINES_QUESTION = (
    "Within 16 people who don’t take the medicine, {k_minus} of them have a particular kind of hormonal imbalance; within 16 people who take the medicine, {k_plus} of them have a particular kind of hormonal imbalance. Question: Suppose that there are 100 people who don’t take the medicine, how many of them would have a particular kind of hormonal imbalance? And if there are 100 people who don't have a particular kind of hormonal imbalance currently and then take the medicine, how many of them would have a particular kind of hormonal imbalance after taking the medicine? Please limit your answer into the 2 numeric values for the 2 questions, for example, (50, 50), without outputing anything else."
)

DOGS_SYSTEM = (
    "Please imagine that you are an animal researcher and you are studying the relationship between music and the tail-wagging behavior of different dog breeds. You have found that some dogs would wag their tails after listening to some kinds of music. Since you are not sure what kind of music might cause which breed of dog to wag their tails, you have decided to investigate this. There are a number of trials in this experiment and each trial involves a different kind of music and a different breed of dogs. For each kind of music, you will see some information about how often dogs who were not played the music wagged their tails, and how often dogs who were played the music wagged their tails. You will be then asked to make some predictions based on these pieces of information."
)

DOGS_QUESTION = (
    "Within 16 dogs who were not played the music, {k_minus} of them wagged their tails; within 16 dogs who were played the music, {k_plus} of them wagged their tails. Question: Suppose that there are 100 dogs who are not played the music, how many of them would wag their tails? And if there are 100 dogs who don't wag their tails currently, how many of them would wag their tails when they are played the music? Please limit your answer into the 2 numeric values for the 2 questions, for example, (50, 50), without outputing anything else."
)

PSYCHICS_SYSTEM = (
    "Please imagine that you are a physics researcher and you are studying the relationship between psychic power and the behavior of molecules. All molecules that you are currently investigating share a characteristic in that they all emit photons at random intervals, but at different rates. A number of psychics have claimed that they can make these molecules emit photons within a minute of when they use their power. You are tasked with investigating this. There are a number of trials in this study and each trial involves a different psychic and a different type of molecule. For each psychic, you will see some information about how many molecules have emitted photons when a particular psychic was simply standing next to the molecules, and how many of them have emitted photons following when psychic used his/her power. You will be then asked to make some predictions based on these pieces of information."
)

PSYCHICS_QUESTION = (
    "With 16 molecules when a particular psychic was simply standing next to the molecules, {k_minus} of them emitted photons; with 16 molecules when psychic used his/her power, {k_plus} of them emitted photons. Question: Suppose that there are 100 molecules when a particular psychic is simply standing next to the molecules, how many of them would emit photons? And if there are 100 molecules that don't emit photons currently, how many of them would emit photons when psychic uses his/her power? Please limit your answer into the 2 numeric values for the 2 questions, for example, (50, 50), without outputing anything else."
)

COIN_SYSTEM = (
    "Imagine that you are a participant in a psychology experiment. Your task is to evaluate the bias in a coin."
)

COIN_QUESTION = (
    "Here is a brief overview of the past coin flips: Out of {n_flips} coin flips, {k_heads} resulted in heads and {k_tails} in tails. With this information, please predict the number of heads in a larger set of 100 coin flips. Please limit your answer to a single value without outputing anything else."
)

LIFESPAN_SYSTEM = (
    "You are an expert at predicting future events."
)

LIFESPAN_QUESTION = (
    "If you were to evaluate the lifespan of a random {probe}-year-old man, what age would you predict he might reach? Please limit your answer to a single value without outputing anything else."
)

GROSSES_SYSTEM = (
    "You are an expert at forecasting movie revenue."
)

GROSSES_QUESTION = (
    "Consider a movie that has already earned {probe} million dollars at the box office, but you're unsure of how long it has been showing. Based on this information, what would be your prediction of the movie's total earnings in million dollars by the end of its run? Please limit your answer to a single value without outputing anything else."
)

POEMS_SYSTEM = (
    "You are an expert at predicting length of poems."
)

POEMS_QUESTION = (
    "Imagine your friend shares her favorite line of poetry with you, which is line {probe} from the poem. How many lines do you think the entire poem contains? Please limit your answer to a single value without outputing anything else."
)

PHARAOHS_SYSTEM = (
    "You are an expert at estimating how long Egyptian pharaohs ruled."
)

PHARAOHS_QUESTION = (
    "If you found information in a book on ancient Egypt stating that a pharaoh had already been in power for {probe} years, how long in years do you think his reign lasted? Please limit your answer to a single value without outputing anything else."
)

RUNTIMES_SYSTEM = (
    "You are an expert at predicting the total run times of movies."
)

RUNTIMES_QUESTION = (
    "During a surprise visit to a friend's house, you discover they've been watching a movie for {probe} minutes. Based on this, how long do you think the movie will be in total, in minutes? Please limit your answer to a single value without outputing anything else."
)

CAKE_SYSTEM = (
    "You are an expert at predicting future events."
)

CAKE_QUESTION = (
    "Imagine you are in somebody’s kitchen and notice that a cake is in the oven. The timer shows that it has been baking for {probe} minutes. How long do you expect the total amount of time to be that the cake needs to bake? Please provide your prediction as a single number. Do not include any additional text or explanation in your response."
)

SUPERHUMAN_AI_SYSTEM = (
    "You are an expert at predicting future events."
)

SUPERHUMAN_AI_QUESTION = (
    "If artificial intelligence reaches human-level intelligence by {probe}, when might it surpass human capabilities in all areas? Please provide your prediction as a single year. Do not include any additional text or explanation in your response."
)

ZERO_CARBON_SYSTEM = (
    "You are an expert at predicting future events."
)

ZERO_CARBON_QUESTION = (
    "If humans manage to achieve 100% renewable energy sources by {probe}, when might global carbon emissions reach zero? Please provide your prediction as a single year. Do not include any additional text or explanation in your response."
)

MARS_COLONY_SYSTEM = (
    "You are an expert at predicting future events."
)

MARS_COLONY_QUESTION = (
    "If humans were able to colonize the Moon by {probe}, when might they colonize Mars? Please provide your prediction as a single year. Do not include any additional text or explanation in your response."
)

